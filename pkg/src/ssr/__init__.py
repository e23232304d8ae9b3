"""Depth reduction for hardware-compliant quantum circuits."""

"""Hurst index estimation from filtered quadratic variations of fBm-driven SDE paths."""

"""Desk-scale field-robot workbench.

Skid-steer locomotion simulation with Gauss-Markov sensor noise, median and
Kalman heading filters, serpentine row navigation, a 10-channel crop/weed
segmentation pipeline, confusion-matrix evaluation, and a live teleop/
telemetry service.
"""

__version__ = "0.1.0"

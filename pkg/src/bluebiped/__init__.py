"""Simulator and design-verification toolkit for the BLUE six-joint biped."""

__version__ = "0.1.0"

from .model import (DHRow, JointState, LinkParams, MotorParams, RobotModel,  # noqa: F401
                    default_model, load_model, save_model, validate_model)

"""
Problem File Integration Module

JSON problem files in and out, plus the reports the CLI prints and writes.
"""

from .integration import ProblemFileIntegration, ProblemInstance, problem_files
from .report_module import ReportModule, Simulation, Synthesis, report_module

__all__ = [
    'ProblemFileIntegration',
    'ProblemInstance',
    'problem_files',
    'ReportModule',
    'Simulation',
    'Synthesis',
    'report_module',
]

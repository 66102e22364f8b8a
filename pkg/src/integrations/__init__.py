"""
Loccsmith Integrations

Front-end support that sits on top of the core modules.
"""

from .problem_files import problem_files, report_module

__all__ = [
    'problem_files',
    'report_module',
]

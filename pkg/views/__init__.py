"""
Views package - Output rendering for the Kelly clock toolkit
"""

from .report_view import ReportView, to_jsonable

__all__ = ['ReportView', 'to_jsonable']

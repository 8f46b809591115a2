from src.utils.response import jsend_success, jsend_fail, jsend_error, emit
from src.utils.pool import run_ordered

__all__ = [
    'jsend_success',
    'jsend_fail',
    'jsend_error',
    'emit',
    'run_ordered',
]

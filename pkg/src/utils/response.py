import json
import sys
from typing import Any, Optional, TextIO


def _line(payload: dict) -> str:
    return json.dumps(payload, sort_keys=False, default=str)


def jsend_success(data: dict) -> str:
    return _line({'status': 'success', 'data': data})


def jsend_fail(data, code: Optional[int] = None) -> str:
    if isinstance(data, str):
        data = {'message': data}
    payload = {'status': 'fail', 'data': data}
    if code is not None:
        payload['code'] = code
    return _line(payload)


def jsend_error(message: str, code: Optional[int] = None, data: Any = None) -> str:
    response = {'status': 'error', 'message': message}
    if code is not None:
        response['code'] = code
    if data:
        response['data'] = data
    return _line(response)


def emit(line: str, stream: Optional[TextIO] = None):
    stream = stream or sys.stdout
    stream.write(line + '\n')
    stream.flush()

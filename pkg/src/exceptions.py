"""
This module defines the exceptions raised by the codec and the exit statuses the CLI maps them to.
"""


class ExitStatus:
    """
    Process exit codes used by the command line front end.
    """
    OK = 0
    IO = 1
    FORMAT = 2


class CodecException(Exception):
    """
    Base exception of the codec, carrying an exit code and a human-readable detail message.

    Args:
        exit_code (int): The exit status the CLI reports for this error.
        detail (str): Description of the problem, offending values quoted in <angle brackets>.
    """

    def __init__(self, exit_code: int, detail: str):
        super().__init__(detail)
        self.exit_code = exit_code
        self.detail = detail

    def __repr__(self) -> str:
        return f"{type(self).__name__}(exit_code={self.exit_code}, detail={self.detail!r})"


class CorruptStreamError(CodecException):
    """
    Raised when a compressed stream cannot be decoded.
    """

    def __init__(self, detail: str):
        super().__init__(ExitStatus.FORMAT, detail)


class UnsupportedFormatError(CodecException):
    """
    Raised for media files or pixel formats the codec does not handle.
    """

    def __init__(self, detail: str):
        super().__init__(ExitStatus.FORMAT, detail)

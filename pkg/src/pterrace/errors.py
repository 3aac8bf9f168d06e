"""Exception types; the CLI maps each to an exit code."""


class PterraceError(Exception):
    exit_code = 1


class ConfigError(PterraceError, ValueError):
    exit_code = 2


class DataError(PterraceError, ValueError):
    exit_code = 3


class ComputeError(PterraceError, RuntimeError):
    exit_code = 4

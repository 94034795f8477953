import logging

LOG_FORMAT = "%(name)-3s: [%(levelname)-9s] %(asctime)s %(message)s"

# names accepted by set_log_level, "all" is a non-standard alias of 1
LEVELS = {"notset": 0, "all": 1, "debug": 10, "info": 20, "warning": 30,
          "error": 40, "critical": 50}

mtLogger = logging.getLogger("mixtree")
mtLogger.setLevel(logging.INFO)
mtLogger.propagate = False
if not mtLogger.handlers:
    ch = logging.StreamHandler()
    ch.setLevel(logging.DEBUG)
    ch.setFormatter(logging.Formatter(LOG_FORMAT))
    mtLogger.addHandler(ch)


def _as_level(level):
    if isinstance(level, str):
        name = level.strip().lower()
        if name.isdigit():
            return int(name)
        if name not in LEVELS:
            raise ValueError(f"Unknown log level {level!r}, use one of {', '.join(LEVELS)}.")
        return LEVELS[name]
    return int(level)


def set_log_level(level):
    """Set the minimal level mtLogger emits.

    Args:
        level (int or str): a number, a string of digits, or one of the
            LEVELS names in any case. Unknown names raise ValueError.
    """

    level = _as_level(level)
    mtLogger.setLevel(level)
    mtLogger.debug("Set log level to %d", level)


def log_to_file(path, level="debug"):
    """copy the log records of a run into ``path``, returns the handler"""

    fh = logging.FileHandler(path, mode="w")
    fh.setLevel(_as_level(level))
    fh.setFormatter(logging.Formatter(LOG_FORMAT))
    mtLogger.addHandler(fh)
    return fh

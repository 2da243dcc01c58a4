import logging
import sys

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def setup_logging(verbosity=0):
    """
    Configura o logger raiz do pacote com saída em stderr

    Args:
        verbosity (int): -1 = só erros, 0 = avisos, 1 = info, 2+ = debug
    """
    if verbosity < 0:
        level = logging.ERROR
    elif verbosity == 0:
        level = logging.WARNING
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = logging.DEBUG

    logger = logging.getLogger("sparseauc")
    logger.setLevel(level)

    # Evitar handlers duplicados quando main() é chamado várias vezes (testes)
    for handler in list(logger.handlers):
        if getattr(handler, "_sparseauc", False):
            logger.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt="%H:%M:%S"))
    handler._sparseauc = True
    logger.addHandler(handler)
    return logger

import contextlib
import os
import tempfile


@contextlib.contextmanager
def atomic_write(path, mode='w', encoding='utf-8'):
    """
    Abre um arquivo temporário no mesmo diretório e o renomeia para `path`
    somente se o bloco terminar sem exceção
    """
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(prefix='.tmp-', dir=directory)
    kwargs = {} if 'b' in mode else {'encoding': encoding, 'newline': ''}
    try:
        with os.fdopen(fd, mode, **kwargs) as handle:
            yield handle
        os.replace(tmp_path, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp_path)
        raise

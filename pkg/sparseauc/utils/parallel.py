"""
Pool de threads compartilhado para operações por linhas

Cada bloco de linhas escreve numa fatia disjunta do resultado, então a saída
não depende do número de threads.
"""

import threading
from concurrent.futures import ThreadPoolExecutor

from sparseauc.config import get_config

_EXECUTORS = {}
_LOCK = threading.Lock()


def get_executor(threads):
    """Retorna (criando se preciso) o executor com `threads` workers"""
    with _LOCK:
        executor = _EXECUTORS.get(threads)
        if executor is None:
            executor = ThreadPoolExecutor(max_workers=threads, thread_name_prefix=f"sparseauc-{threads}")
            _EXECUTORS[threads] = executor
        return executor


def chunk_bounds(n, threads, min_chunk=None):
    """Divide range(n) em até `threads` blocos contíguos [(start, stop), ...]"""
    if min_chunk is None:
        min_chunk = get_config('runtime')['min_chunk']
    threads = max(1, int(threads))
    chunks = min(threads, max(1, n // max(1, min_chunk)))
    if n == 0:
        return [(0, 0)]
    step, extra = divmod(n, chunks)
    bounds = []
    start = 0
    for c in range(chunks):
        stop = start + step + (1 if c < extra else 0)
        bounds.append((start, stop))
        start = stop
    return bounds


def run_chunks(fn, n, threads=1, min_chunk=None):
    """
    Executa fn(start, stop) para cada bloco de linhas

    fn deve escrever seus resultados em fatias [start:stop] de arrays
    pré-alocados pelo chamador; aqui só se espera o término.
    """
    bounds = chunk_bounds(n, threads, min_chunk)
    if len(bounds) == 1:
        fn(*bounds[0])
        return
    executor = get_executor(int(threads))
    futures = [executor.submit(fn, start, stop) for start, stop in bounds]
    for future in futures:
        future.result()

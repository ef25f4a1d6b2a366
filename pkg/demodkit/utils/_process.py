import logging
import multiprocessing
import traceback

import psutil

logger = logging.getLogger("demodkit")


def default_workers() -> int:
    """
    Number of physical cores, falling back to logical cores when `psutil`
    cannot tell them apart.
    """
    return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1


class _CellRunner:
    def __init__(self, function):
        self.function = function

    def __call__(self, item):
        try:
            return True, self.function(item)
        except Exception as e:
            msg = "{}\n\nOriginal {}".format(e, traceback.format_exc())
            return False, e.__class__(msg)


def run_parallel(function, items, workers: int = 1):
    """
    Applies `function` to every item and returns the results in input order.

    With `workers=1` everything runs in the calling process. Otherwise a
    `multiprocessing` pool of `workers` processes (physical core count when
    `None`) evaluates the items; exceptions raised inside a worker are re-raised
    here with the worker traceback attached to the message.
    """
    items = list(items)

    if workers is None:
        workers = default_workers()

    workers = min(workers, len(items)) if items else 1

    if workers <= 1:
        return [function(item) for item in items]

    logger.info("💻 Running %i cells on %i workers" % (len(items), workers))

    with multiprocessing.Pool(workers) as pool:
        outcomes = pool.map(_CellRunner(function), items, chunksize=1)

    results = []

    for ok, value in outcomes:
        if not ok:
            raise value

        results.append(value)

    return results

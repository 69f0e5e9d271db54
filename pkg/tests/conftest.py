import threading
import time

import pytest

# Bound used wherever a test waits for a wake-up that must happen.
WAKE_TIMEOUT = 1.0


class Timed:
    """Run a callable in a daemon thread and wait for it with a deadline."""

    def __init__(self, fn, *args):
        self.result = None
        self.error = None
        self._done = threading.Event()

        def run():
            try:
                self.result = fn(*args)
            except BaseException as exc:  # surfaced by .get()
                self.error = exc
            finally:
                self._done.set()

        self.thread = threading.Thread(target=run, daemon=True)
        self.thread.start()

    def finished(self, timeout=WAKE_TIMEOUT):
        return self._done.wait(timeout)

    def get(self, timeout=WAKE_TIMEOUT):
        if not self._done.wait(timeout):
            raise AssertionError(f"still blocked after {timeout}s")
        if self.error is not None:
            raise self.error
        return self.result


@pytest.fixture
def timed():
    return Timed


def wait_for_forks(timeout=10.0):
    """Wait until no thread started by fork() is alive."""
    deadline = time.monotonic() + timeout
    for thread in threading.enumerate():
        if thread.name.startswith("session-fork-"):
            thread.join(max(0.0, deadline - time.monotonic()))
            if thread.is_alive():
                return False
    return True


_criteria = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    _criteria[number] = (title, call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}")

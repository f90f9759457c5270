"""Baseline readers-writer lock built on plain mutexes.

This is the conventional two-lock recipe: every reader entry and exit
takes a common monitor lock, which is exactly the contention the
busy-forbidden protocol avoids.
"""

import threading


class PlatformRwLock:
    def __init__(self):
        self._monitor = threading.Lock()
        self._exclude = threading.Lock()
        self._readers = 0

    def enter_shared(self):
        with self._monitor:
            self._readers += 1
            if self._readers == 1:
                self._exclude.acquire()

    def leave_shared(self):
        with self._monitor:
            self._readers -= 1
            if self._readers == 0:
                self._exclude.release()

    def enter_exclusive(self):
        self._exclude.acquire()

    def leave_exclusive(self):
        self._exclude.release()

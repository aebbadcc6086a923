#!/usr/bin/env python3
"""
Event Bus - queue-backed dispatcher between trial workers and the harness.

Workers emit from their own threads; handlers run on whichever thread calls
process_events(), which in practice is the harness thread.
"""
import queue
import threading
import time
from dataclasses import dataclass
from enum import Enum, auto
from typing import Any, Callable, Dict, List, Optional

from logger import get_logger


class EventType(Enum):
    """Events of an experiment run."""
    TRIAL_STARTED = auto()
    TRIAL_COMPLETED = auto()
    TRIAL_FAILED = auto()
    SWEEP_POINT_COMPLETED = auto()


@dataclass
class Event:
    """Event with type, payload, and metadata."""
    type: EventType
    payload: Dict[str, Any]
    timestamp: float
    source: str = "unknown"

    def __post_init__(self):
        if self.timestamp == 0:
            self.timestamp = time.time()


class EventBus:
    """Thread-safe event bus built on queue.Queue."""

    def __init__(self, max_queue_size: int = 0):
        """Initialize event bus.

        Args:
            max_queue_size: Maximum queued events; 0 means unbounded so no
                trial result is ever dropped
        """
        self._queue: "queue.Queue[Event]" = queue.Queue(maxsize=max_queue_size)
        self._subscribers: Dict[EventType, List[Callable[[Event], None]]] = {}
        self._lock = threading.Lock()
        self._running = True
        self.logger = get_logger()

        # Metrics
        self._events_emitted = 0
        self._events_processed = 0
        self._events_dropped = 0

    def emit(self, event_type: EventType, payload: Optional[Dict[str, Any]] = None, source: str = "unknown"):
        """Emit an event (non-blocking).

        Args:
            event_type: Type of event
            payload: Event data
            source: Source identifier (e.g., 'trial-worker-0', 'harness')
        """
        if not self._running:
            return

        event = Event(type=event_type, payload=payload or {}, timestamp=time.time(), source=source)
        try:
            self._queue.put_nowait(event)
            with self._lock:
                self._events_emitted += 1
        except queue.Full:
            with self._lock:
                self._events_dropped += 1
            self.logger.warning("event queue full, dropped event", event=event_type.name, source=source)

    def subscribe(self, event_type: EventType, handler: Callable[[Event], None]):
        """Subscribe to an event type.

        Args:
            event_type: Type of event to listen for
            handler: Callback function(event)
        """
        with self._lock:
            self._subscribers.setdefault(event_type, []).append(handler)

    def process_events(self, max_events: int = 100, timeout: float = 0.0) -> int:
        """Dispatch pending events on the calling thread.

        Args:
            max_events: Maximum events to process per call
            timeout: Seconds to wait for the first event when the queue is empty

        Returns:
            Number of events processed
        """
        processed = 0
        while processed < max_events:
            try:
                if processed == 0 and timeout > 0:
                    event = self._queue.get(timeout=timeout)
                else:
                    event = self._queue.get_nowait()
            except queue.Empty:
                break
            self._dispatch(event)
            processed += 1
            self._events_processed += 1
        return processed

    def _dispatch(self, event: Event):
        with self._lock:
            handlers = list(self._subscribers.get(event.type, []))

        for handler in handlers:
            try:
                handler(event)
            except Exception:
                self.logger.exception("error in event handler", event=event.type.name)

    def get_metrics(self) -> Dict[str, int]:
        """Get event bus metrics.

        Returns:
            Dictionary of metrics
        """
        return {
            'events_emitted': self._events_emitted,
            'events_processed': self._events_processed,
            'events_dropped': self._events_dropped,
            'queue_size': self._queue.qsize()
        }

    def shutdown(self):
        """Stop accepting events and drop whatever is still queued."""
        self._running = False
        while not self._queue.empty():
            try:
                self._queue.get_nowait()
            except queue.Empty:
                break

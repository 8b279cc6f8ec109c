from typing import Any, Callable, Generic, TypeVar

PayloadType = TypeVar("PayloadType")


class Signal(Generic[PayloadType]):
    """
    A minimal observer hook used to broadcast progress records.

    Solvers and the experiment harness publish one payload per event
    (a trace checkpoint, a finished trial, a failed ensemble stage) and any
    number of listeners can subscribe to it.

    Attributes:
        _handlers (list): Listeners called, in connection order, on every emit.

    Methods:
        connect(handler): Subscribes a listener.
        disconnect(handler): Unsubscribes a listener.
        emit(payload): Calls every listener with the payload.
    """

    def __init__(self) -> None:
        self._handlers: list[Callable[[PayloadType], Any]] = []

    def __call__(self, payload: PayloadType) -> None:
        self.emit(payload)

    def __len__(self) -> int:
        return len(self._handlers)

    def connect(self, handler: Callable[[PayloadType], Any]) -> Callable[[PayloadType], Any]:
        """
        Subscribe a listener. Returns the handler so it can be used as a decorator.

        Args:
            handler (callable): Called with the payload of every emit.
        """
        self._handlers.append(handler)
        return handler

    def disconnect(self, handler: Callable[[PayloadType], Any]) -> None:
        """
        Unsubscribe a listener.

        Args:
            handler (callable): A listener previously passed to connect.
        """
        self._handlers.remove(handler)

    def emit(self, payload: PayloadType) -> None:
        for handler in self._handlers:
            handler(payload)

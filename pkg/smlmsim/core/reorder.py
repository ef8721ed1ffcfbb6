from __future__ import annotations

import typing as _t
from heapq import (heappop as _heappop,
                   heappush as _heappush)

import typing_extensions as _te
from reprit.base import generate_repr as _generate_repr

Value = _t.TypeVar('Value')


class Entry(_t.Generic[Value]):
    index: int
    value: Value

    __slots__ = 'index', 'value'

    def __init__(self, index: int, value: Value) -> None:
        self.index, self.value = index, value

    @_t.overload
    def __lt__(self, other: _te.Self) -> bool:
        ...

    @_t.overload
    def __lt__(self, other: _t.Any) -> _t.Any:
        ...

    def __lt__(self, other: _t.Any) -> _t.Any:
        return (self.index < other.index
                if isinstance(other, Entry)
                else NotImplemented)

    __repr__ = _generate_repr(__init__)


class ReorderBuffer(_t.Generic[Value]):
    """
    Collects values that arrive in arbitrary order
    and releases them strictly by consecutive index.

    >>> buffer = ReorderBuffer()
    >>> buffer.push(1, 'b')
    >>> buffer.release()
    []
    >>> buffer.push(0, 'a')
    >>> buffer.release()
    ['a', 'b']
    >>> buffer.next_index
    2
    """
    _entries: _t.List[Entry[Value]]
    _pending: _t.Set[int]

    __slots__ = '_entries', '_next_index', '_pending', '_start'

    def __init__(self, start: int = 0) -> None:
        self._entries, self._pending = [], set()
        self._next_index = self._start = start

    __repr__ = _generate_repr(__init__)

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def start(self) -> int:
        return self._start

    @property
    def next_index(self) -> int:
        return self._next_index

    def push(self, index: int, value: Value) -> None:
        if index < self._next_index or index in self._pending:
            raise ValueError('Index {!r} has already been pushed.'
                             .format(index))
        self._pending.add(index)
        _heappush(self._entries, Entry(index, value))

    def release(self) -> _t.List[Value]:
        result = []
        while self._entries and self._entries[0].index == self._next_index:
            entry = _heappop(self._entries)
            self._pending.remove(entry.index)
            result.append(entry.value)
            self._next_index += 1
        return result

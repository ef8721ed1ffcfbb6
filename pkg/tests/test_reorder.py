from typing import List

import pytest
from hypothesis import given

from smlmsim.core.reorder import ReorderBuffer
from tests import strategies


@given(strategies.reorder_permutations)
def test_release_order(indices: List[int]) -> None:
    buffer: ReorderBuffer[int] = ReorderBuffer()
    result = []

    for index in indices:
        buffer.push(index, -index)
        result.extend(buffer.release())

    assert result == [-index for index in range(len(indices))]
    assert len(buffer) == 0
    assert buffer.next_index == len(indices)


@given(strategies.reorder_permutations)
def test_holds_until_gap_filled(indices: List[int]) -> None:
    buffer: ReorderBuffer[int] = ReorderBuffer()

    for index in indices:
        if index:
            buffer.push(index, index)

    assert buffer.release() == []
    assert len(buffer) == max(len(indices) - 1, 0)


def test_start() -> None:
    buffer: ReorderBuffer[str] = ReorderBuffer(5)

    buffer.push(6, 'b')
    buffer.push(5, 'a')

    assert buffer.start == 5
    assert buffer.release() == ['a', 'b']


def test_duplicate() -> None:
    buffer: ReorderBuffer[str] = ReorderBuffer()
    buffer.push(1, 'b')

    with pytest.raises(ValueError):
        buffer.push(1, 'c')


def test_stale() -> None:
    buffer: ReorderBuffer[str] = ReorderBuffer()
    buffer.push(0, 'a')
    buffer.release()

    with pytest.raises(ValueError):
        buffer.push(0, 'b')

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sbeval.core import (
    UPPERCASE,
    BlockType,
    DropCall,
    EvaluationConfig,
    GridConfig,
    Level,
    LevelError,
    PlacedBlock,
    block_dimensions,
    character_at,
    index_of,
    occupied_columns,
)


@pytest.mark.parametrize("tag, dims", [(BlockType.B11, (1, 1)), (BlockType.B13, (1, 3)), (BlockType.B31, (3, 1))])
def test_block_dimensions(tag, dims):
    assert block_dimensions(tag) == dims
    assert (tag.width, tag.height) == dims
    assert tag.width % 2 == 1


@pytest.mark.parametrize("call, span", [
    (DropCall(BlockType.B11, 5), (5, 5)),
    (DropCall(BlockType.B31, 5), (4, 6)),
    (DropCall(BlockType.B13, 0), (0, 0)),
])
def test_occupied_columns(call, span):
    assert occupied_columns(call) == span


@given(st.sampled_from(list(BlockType)), st.integers(-50, 50))
def test_occupied_columns_span_is_centred(tag, x):
    left, right = occupied_columns(DropCall(tag, x))
    assert right - left + 1 == tag.width
    assert left + right == 2 * x


@given(st.integers(0, 25))
def test_alphabet_round_trip(pos):
    assert index_of(character_at(pos)) == pos
    assert character_at(index_of(UPPERCASE[pos])) == UPPERCASE[pos]


def test_alphabet_defaults():
    cfg = EvaluationConfig()
    assert cfg.characters == 26
    assert cfg.alphabet[0] == "A"


@pytest.mark.parametrize("kwargs", [{"trials": 1}, {"programs": 0}, {"alphabet": ()}, {"alphabet": ("a",)}])
def test_evaluation_config_rejects(kwargs):
    with pytest.raises(ValueError):
        EvaluationConfig(**kwargs)


def test_grid_minimum():
    with pytest.raises(ValueError):
        GridConfig(2, 10)


def test_level_rejects_overlap_and_out_of_grid():
    grid = GridConfig(5, 5)
    with pytest.raises(LevelError):
        Level(grid, (PlacedBlock(BlockType.B11, 0, 0), PlacedBlock(BlockType.B31, 0, 0)))
    with pytest.raises(LevelError):
        Level(grid, (PlacedBlock(BlockType.B31, 3, 0),))
    with pytest.raises(LevelError):
        Level(grid, (PlacedBlock(BlockType.B13, 0, 3),))

import numpy as np
import pytest

from fairbound import Alphabet, JointDistribution, typewriter_joint
from fairbound.jointfile import (
    JointFileError,
    format_channel,
    format_joint,
    parse_channel,
    parse_joint,
    read_joint,
    write_joint,
)
from fairbound.info import condition

from conftest import random_joint


def test_round_trip(rng, tmp_path):
    j = random_joint(rng, (2, 3, 4), zeros=0.4)
    path = tmp_path / "j.txt"
    write_joint(j, path)
    k = read_joint(path)
    assert k.names == j.names
    np.testing.assert_array_equal(k.probs, j.probs)
    assert format_joint(k) == path.read_text()


def test_labels_round_trip():
    j = typewriter_joint(10, 0.5)
    k = parse_joint(format_joint(j))
    assert k.alphabet("X").symbols == tuple(str(i) for i in range(1, 11))
    np.testing.assert_array_equal(k.probs, j.probs)


def test_comments_and_unlisted_cells():
    text = "# a joint\nvars: S 2 X 1 T 2\n0 0 0 0.25  # trailing\n\n1 0 1 0.75\n"
    j = parse_joint(text)
    np.testing.assert_array_equal(j.probs, [[[0.25, 0.0]], [[0.0, 0.75]]])


def test_shortest_round_trip_floats():
    p = 0.1 + 0.2
    j = parse_joint(f"vars: S 1 X 1 T 2\n0 0 0 {p!r}\n0 0 1 {1 - p!r}\n")
    assert j.probs[0, 0, 0] == p


@pytest.mark.parametrize("text,where", [
    ("0 0 0 1.0\n", "line 1"),
    ("vars: S 2 X\n", "line 1"),
    ("vars: S 2 X 1 T 1\n0 0 0 0.5\n2 0 0 0.5\n", "line 3"),
    ("vars: S 2 X 1 T 1\n0 0 0 0.5\n0 0 0 0.5\n", "line 3"),
    ("vars: S 2 X 1 T 1\n0 0 0.5\n", "line 2"),
    ("vars: S 2 X 1 T 1\n0 0 0 -0.5\n1 0 0 1.5\n", "line 2"),
    ("vars: S 2 X 1 T 1\n0 0 0 abc\n", "line 2"),
])
def test_parse_errors_have_line_numbers(text, where):
    with pytest.raises(JointFileError, match=where):
        parse_joint(text)


def test_normalization_failure():
    with pytest.raises(JointFileError, match="normal"):
        parse_joint("vars: S 2 X 1 T 1\n0 0 0 0.5\n1 0 0 0.6\n")


def test_bad_labels():
    with pytest.raises(JointFileError):
        parse_joint("vars: S 2 X 1 T 1\nlabels S: a\n0 0 0 1.0\n")


def test_channel_round_trip(rng):
    j = random_joint(rng)
    ch = condition(j, "T", ("S", "X"))
    text = format_channel(ch, ["note"])
    assert text.startswith("# note\nchannel: T 3 given S 2 X 3\n")
    back = parse_channel(text)
    np.testing.assert_array_equal(back.table, ch.table)


def test_channel_tuple_labels_have_no_spaces():
    from fairbound import Channel
    ch = Channel((Alphabet.range("A", 1),), Alphabet("Y", [("c", 0), ("d", 1)]), [[0.5, 0.5]])
    back = parse_channel(format_channel(ch))
    assert back.output.symbols == ("('c',0)", "('d',1)")

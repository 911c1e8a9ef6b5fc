import pytest

from girthforge.alist import AlistError, read_alist, write_alist
from girthforge.tanner import build_graph


def sample_graph():
    return build_graph(3, 4, [(1, 1), (1, 3), (2, 1), (2, 2), (2, 3), (3, 2), (3, 4)])


class TestWrite:
    def test_known_layout(self):
        g = build_graph(2, 3, [(1, 1), (1, 2), (2, 2), (2, 3)])
        assert write_alist(g) == (
            "3 2\n"
            "2 2\n"
            "1 2 1\n"
            "2 2\n"
            "1 0\n"
            "1 2\n"
            "2 0\n"
            "1 2\n"
            "2 3\n"
        )

    def test_zero_padding_uses_max_degree(self):
        text = write_alist(sample_graph())
        lines = text.splitlines()
        assert lines[1] == "2 3"
        assert lines[7] == "3 0"
        assert lines[8] == "1 3 0"


class TestRoundTrip:
    def test_bit_exact(self):
        text = write_alist(sample_graph())
        assert write_alist(read_alist(text)) == text

    def test_empty_matrix(self):
        g = build_graph(2, 2, [])
        text = write_alist(g)
        back = read_alist(text)
        assert back.entries == frozenset()
        assert write_alist(back) == text

    def test_preserves_structure(self):
        g = sample_graph()
        back = read_alist(write_alist(g))
        assert (back.m, back.n, back.entries) == (g.m, g.n, g.entries)


class TestMalformed:
    def test_truncated(self):
        with pytest.raises(AlistError, match="lines"):
            read_alist("4 3\n3 3\n")

    def test_non_integer(self):
        with pytest.raises(AlistError, match="line 1"):
            read_alist("x 3\n1 1\n1 1 1\n1 1 1\n")

    def test_degree_mismatch(self):
        text = write_alist(sample_graph()).replace("1 3 0", "1 3 3", 1)
        with pytest.raises(AlistError, match="degree"):
            read_alist(text)

    def test_out_of_range_index(self):
        g = build_graph(2, 2, [(1, 1), (2, 2)])
        text = write_alist(g).replace("\n1\n2\n", "\n1\n3\n", 1)
        with pytest.raises(AlistError):
            read_alist(text)

    def test_inconsistent_row_and_column_lists(self):
        text = (
            "2 2\n"
            "1 1\n"
            "1 1\n"
            "1 1\n"
            "1\n"
            "2\n"
            "2\n"  # row 1 claims column 2, column lists say (1,1)
            "1\n"
        )
        with pytest.raises(AlistError, match="different"):
            read_alist(text)

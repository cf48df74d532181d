"""Reading and writing the pair-count and dominant-frequency files.

Both formats are delimited text with a required header line,
``order1,order2,count`` and ``order,count`` respectively. The delimiter
(comma or tab) is taken from the header. Blank lines and lines starting
with ``#`` are ignored.
"""

import csv
import io
from importlib import resources
from pathlib import Path

from .errors import (
    DataError,
    DuplicateEntryError,
    EmptyDatasetError,
    HeaderError,
    MalformedRowError,
    NegativeCountError,
    SelfPairError,
    UnknownOrderError,
)
from .inference import PairCountTable, canonical_pair
from .models import DominantFrequencies
from .ring import ORDERS, Order

PAIR_HEADER = ("order1", "order2", "count")
FREQUENCY_HEADER = ("order", "count")

CANONICAL_COUNTS = (
    (Order.SOV, Order.SVO, 29),
    (Order.VSO, Order.VOS, 14),
    (Order.SVO, Order.VSO, 13),
    (Order.SVO, Order.VOS, 8),
    (Order.SOV, Order.OVS, 3),
)

CANONICAL_PAIRS_FILE = "primary_alternating_orders.csv"
REFERENCE_FREQUENCIES_FILE = "wals81_dominant_order.csv"


def _rows(text, header):
    """Yield ``(line_number, cells)`` for the data rows after checking the header."""
    if hasattr(text, "read"):
        text = text.read()
    lines = [
        (i, line)
        for i, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not lines:
        raise HeaderError(f"missing header line {','.join(header)!r}")
    header_line, first = lines[0]
    delimiter = "\t" if "\t" in first else ","
    found = tuple(cell.strip().lower() for cell in first.split(delimiter))
    if found != header:
        raise HeaderError(f"expected header {','.join(header)!r}, got {first!r}", line=header_line)
    for lineno, line in lines[1:]:
        (cells,) = csv.reader([line], delimiter=delimiter)
        cells = [c.strip() for c in cells]
        if len(cells) != len(header):
            raise MalformedRowError(f"expected {len(header)} fields, got {len(cells)}", line=lineno)
        yield lineno, cells


def _order(token, lineno):
    try:
        return Order.parse(token)
    except UnknownOrderError as exc:
        raise UnknownOrderError(str(exc), line=lineno) from None


def _count(token, lineno):
    try:
        value = int(token)
    except ValueError:
        raise MalformedRowError(f"count {token!r} is not an integer", line=lineno) from None
    if value < 0:
        raise NegativeCountError(f"count must be nonnegative, got {value}", line=lineno)
    return value


def parse_pair_counts(text):
    """Parse an ``order1,order2,count`` file into a :class:`PairCountTable`."""
    counts = {}
    for lineno, (a, b, c) in _rows(text, PAIR_HEADER):
        x, y = _order(a, lineno), _order(b, lineno)
        if x == y:
            raise SelfPairError("pair members must differ", line=lineno)
        pair = canonical_pair(x, y)
        if pair in counts:
            raise DuplicateEntryError(f"duplicate pair {pair[0]},{pair[1]}", line=lineno)
        counts[pair] = _count(c, lineno)
    table = PairCountTable(counts)
    if table.total == 0:
        raise EmptyDatasetError("empty dataset")
    return table


def parse_dominant_frequencies(text):
    """Parse an ``order,count`` file; orders not listed get a count of 0."""
    counts = {}
    for lineno, (a, c) in _rows(text, FREQUENCY_HEADER):
        order = _order(a, lineno)
        if order in counts:
            raise DuplicateEntryError(f"duplicate order {order}", line=lineno)
        counts[order] = _count(c, lineno)
    if not any(counts.values()):
        raise EmptyDatasetError("at least one dominant-order count must be positive")
    return DominantFrequencies(counts)


def format_pair_counts(table, delimiter=","):
    """Serialize a table in canonical pair order (inverse of :func:`parse_pair_counts`)."""
    out = io.StringIO()
    writer = csv.writer(out, delimiter=delimiter, lineterminator="\n")
    writer.writerow(PAIR_HEADER)
    for (x, y), c in table.items():
        writer.writerow([x.value, y.value, c])
    return out.getvalue()


def format_dominant_frequencies(freqs, delimiter=","):
    out = io.StringIO()
    writer = csv.writer(out, delimiter=delimiter, lineterminator="\n")
    writer.writerow(FREQUENCY_HEADER)
    for order in ORDERS:
        writer.writerow([order.value, freqs.counts[order]])
    return out.getvalue()


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not valid UTF-8 ({exc.reason})") from None


def read_pair_counts(path):
    return parse_pair_counts(_read(path))


def read_dominant_frequencies(path):
    return parse_dominant_frequencies(_read(path))


def canonical_dataset():
    """The 67 languages with a pair of primary alternating orders."""
    return PairCountTable.from_rows(CANONICAL_COUNTS)


def _package_file(name):
    return resources.files("wordring").joinpath("data", name)


def canonical_pairs_text():
    return _package_file(CANONICAL_PAIRS_FILE).read_text(encoding="utf-8")


def reference_frequencies():
    """Dominant-order counts shipped with the package (atlas chapter 81A)."""
    return parse_dominant_frequencies(_package_file(REFERENCE_FREQUENCIES_FILE).read_text(encoding="utf-8"))

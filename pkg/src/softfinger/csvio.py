"""CSV reading/writing helpers shared by the library and the CLI.

Floats are written with repr(), the shortest representation that
round-trips, so output files are deterministic and diff-stable.
"""

import csv

from softfinger import errors


def fmt(v) -> str:
    return repr(float(v))


def write_rows(path, header, rows) -> None:
    """Write one header line plus formatted float rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def read_float_table(path, expected_header):
    """Read a CSV with an exact expected header into a list of float rows.

    Raises ConfigError on a missing/mismatched header, short rows, or
    unparseable numbers.
    """
    expected = list(expected_header)
    try:
        fh = open(path, "r", newline="", encoding="utf-8")
    except OSError as exc:
        raise errors.ConfigError(f"cannot read CSV file: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise errors.ConfigError(f"{path}: empty CSV file") from None
        if [h.strip() for h in header] != expected:
            raise errors.ConfigError(
                f"{path}: expected header {','.join(expected)!r}, "
                f"got {','.join(header)!r}"
            )
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            if not raw or (len(raw) == 1 and not raw[0].strip()):
                continue
            if len(raw) != len(expected):
                raise errors.ConfigError(
                    f"{path}:{lineno}: expected {len(expected)} fields, "
                    f"got {len(raw)}"
                )
            try:
                rows.append([float(v) for v in raw])
            except ValueError as exc:
                raise errors.ConfigError(f"{path}:{lineno}: {exc}") from exc
    return rows

"""Line-delimited JSON records and the flat scan table, both with a schema header."""
import csv
import json
import logging
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

from kgdom.errors import KnodelError

logger = logging.getLogger(__name__)

SCAN_SCHEMA = "kgdom-scan/1"
CERT_SCHEMA = "kgdom-cert/1"
SOLVE_SCHEMA = "kgdom-solve/1"
TABLE_SCHEMA = "kgdom-table/1"

TABLE_COLUMNS = ("n", "degree", "witness", "lb_berge", "lb_prop2", "ub_best",
                 "ub_src", "gamma", "conj1", "conj2", "slack")


def header(schema: str, **extra: Any) -> Dict[str, Any]:
    rec = {"kind": "header", "schema": schema}
    rec.update(extra)
    return rec


def write_jsonl(records: Iterable[Dict[str, Any]], fh: TextIO, schema: str, **extra: Any) -> int:
    """Write a header line followed by one JSON object per record."""
    fh.write(json.dumps(header(schema, **extra), sort_keys=True) + "\n")
    count = 0
    for rec in records:
        fh.write(json.dumps(rec, sort_keys=True) + "\n")
        count += 1
    return count


def read_jsonl(fh: TextIO, schema: Optional[str] = None) -> Tuple[str, List[Dict[str, Any]]]:
    """Return (schema, records); header lines are dropped."""
    found_schema = None
    records = []
    for lineno, line in enumerate(fh, 1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise KnodelError(f"line {lineno}: invalid JSON: {e}") from e
        if rec.get("kind") == "header":
            found_schema = rec.get("schema")
            continue
        records.append(rec)
    if schema is not None and found_schema is not None:
        if found_schema.split("/")[0] != schema.split("/")[0]:
            raise KnodelError(f"expected schema {schema}, file declares {found_schema}")
        if found_schema != schema:
            logger.warning(f"schema version differs: file {found_schema}, reader {schema}")
    return found_schema, records


def write_table(rows: Iterable[Sequence[Any]], fh: TextIO) -> int:
    """Tab-separated table with a fixed column schema."""
    fh.write(f"# schema: {TABLE_SCHEMA}\n")
    writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
    writer.writerow(TABLE_COLUMNS)
    count = 0
    for row in rows:
        writer.writerow(["-" if v is None else v for v in row])
        count += 1
    return count

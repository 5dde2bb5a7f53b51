"""Concept/relation file ingestion and the temporal train/test split.

File formats (UTF-8, tab-separated, ``#``-prefixed comment lines allowed):

* concepts:  ``id<TAB>kind<TAB>surface<TAB>first_year`` with kind in
  {Task, Method}
* relations: ``src<TAB>dst<TAB>rel_kind<TAB>year<TAB>paper_id`` with
  rel_kind in {TaskMethod, TaskTask, MethodMethod}

Relations are undirected.  On load they are put into a canonical
orientation (Task endpoint first for TaskMethod, lexicographically
smaller id first otherwise) so that duplicates are well defined; exact
duplicates collapse to the earliest year.
"""

import logging
from dataclasses import dataclass, replace

from amrec.errors import ParseError, ValidationError

logger = logging.getLogger(__name__)

TASK = "Task"
METHOD = "Method"
CONCEPT_KINDS = (TASK, METHOD)

TASK_METHOD = "TaskMethod"
TASK_TASK = "TaskTask"
METHOD_METHOD = "MethodMethod"
RELATION_KINDS = (TASK_METHOD, TASK_TASK, METHOD_METHOD)

# Endpoint kinds required by each relation kind, in canonical order.
_ENDPOINT_KINDS = {
    TASK_METHOD: (TASK, METHOD),
    TASK_TASK: (TASK, TASK),
    METHOD_METHOD: (METHOD, METHOD),
}


@dataclass(frozen=True)
class ConceptRecord:
    id: str
    kind: str
    surface: str
    first_year: int


@dataclass(frozen=True)
class RelationRecord:
    src: str
    dst: str
    rel_kind: str
    year: int
    paper_id: str

    @property
    def pair(self) -> tuple[str, str]:
        return (self.src, self.dst)


class ConceptTable:
    """Registry of concepts keyed by id.

    Duplicate ids in an input file collapse to the earliest first_year;
    each collapse is recorded in ``warnings``.
    """

    def __init__(self):
        self._records: dict[str, ConceptRecord] = {}
        self.warnings: list[str] = []

    def add(self, rec: ConceptRecord) -> None:
        if not rec.id:
            raise ValidationError("concept id must be non-empty")
        if rec.kind not in CONCEPT_KINDS:
            raise ValidationError(f"unknown concept kind {rec.kind!r} for id {rec.id!r}")
        existing = self._records.get(rec.id)
        if existing is None:
            self._records[rec.id] = rec
            return
        if existing.kind != rec.kind:
            raise ValidationError(
                f"concept {rec.id!r} declared as both {existing.kind} and {rec.kind}"
            )
        kept = existing if existing.first_year <= rec.first_year else rec
        self._records[rec.id] = kept
        self.warnings.append(f"duplicate concept id {rec.id!r}; kept first_year {kept.first_year}")

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self._records

    def __getitem__(self, concept_id: str) -> ConceptRecord:
        return self._records[concept_id]

    def get(self, concept_id: str):
        return self._records.get(concept_id)

    def kind_of(self, concept_id: str) -> str:
        return self._records[concept_id].kind

    def records(self) -> list[ConceptRecord]:
        """All records, sorted by id (the on-disk order)."""
        return [self._records[cid] for cid in sorted(self._records)]

    def ids_of_kind(self, kind: str) -> list[str]:
        return sorted(cid for cid, rec in self._records.items() if rec.kind == kind)

    def __eq__(self, other) -> bool:
        return isinstance(other, ConceptTable) and self._records == other._records


@dataclass
class SplitDataset:
    """Temporally split relations plus the concept table they refer to."""

    train: list[RelationRecord]
    test: list[RelationRecord]
    concepts: ConceptTable
    cutoff_year: int
    removed_seen_pairs: int = 0


@dataclass
class SplitStats:
    cutoff_year: int
    train_records: int = 0
    test_records: int = 0
    train_tasks: int = 0
    train_methods: int = 0
    train_pairs: int = 0
    test_tasks: int = 0
    test_methods: int = 0
    test_pairs: int = 0
    test_unseen_concepts: int = 0
    removed_seen_pairs: int = 0

    def as_lines(self) -> list[str]:
        return [f"{name}={getattr(self, name)}" for name in (
            "cutoff_year", "train_records", "test_records",
            "train_tasks", "train_methods", "train_pairs",
            "test_tasks", "test_methods", "test_pairs",
            "test_unseen_concepts", "removed_seen_pairs",
        )]


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield line_no, line


def load_concepts(path) -> ConceptTable:
    """Parse a concepts file into a ConceptTable."""
    table = ConceptTable()
    for line_no, line in _data_lines(path):
        fields = line.split("\t")
        if len(fields) != 4:
            raise ParseError(path, line_no, f"expected 4 tab-separated fields, got {len(fields)}")
        cid, kind, surface, year_text = fields
        try:
            year = int(year_text)
        except ValueError:
            raise ParseError(path, line_no, f"first_year is not an integer: {year_text!r}") from None
        if kind not in CONCEPT_KINDS:
            raise ValidationError(f"{path}:{line_no}: unknown concept kind {kind!r}")
        table.add(ConceptRecord(cid, kind, surface, year))
    for warning in table.warnings:
        logger.warning("%s: %s", path, warning)
    return table


def save_concepts(table: ConceptTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in table.records():
            fh.write(f"{rec.id}\t{rec.kind}\t{rec.surface}\t{rec.first_year}\n")


def canonical_relation(rec: RelationRecord, concepts: ConceptTable) -> RelationRecord:
    """Validate endpoint kinds and normalize the undirected orientation."""
    if rec.rel_kind not in RELATION_KINDS:
        raise ValidationError(f"unknown relation kind {rec.rel_kind!r}")
    if rec.src == rec.dst:
        raise ValidationError(f"self-relation on concept {rec.src!r} is not allowed")
    for endpoint in (rec.src, rec.dst):
        if endpoint not in concepts:
            raise ValidationError(f"relation endpoint {endpoint!r} is not a known concept")
    kinds = (concepts.kind_of(rec.src), concepts.kind_of(rec.dst))
    want = _ENDPOINT_KINDS[rec.rel_kind]
    if sorted(kinds) != sorted(want):
        raise ValidationError(
            f"relation {rec.src!r}-{rec.dst!r} of kind {rec.rel_kind} "
            f"has endpoint kinds {kinds[0]}/{kinds[1]}"
        )
    src, dst = rec.src, rec.dst
    if rec.rel_kind == TASK_METHOD:
        if kinds[0] != TASK:
            src, dst = dst, src
    elif src > dst:
        src, dst = dst, src
    if (src, dst) != (rec.src, rec.dst):
        rec = replace(rec, src=src, dst=dst)
    return rec


def load_relations(path, concepts: ConceptTable) -> list[RelationRecord]:
    """Parse and validate a relations file against an already loaded table.

    Duplicates (same canonical endpoints and kind) collapse to the record
    with the minimum year.
    """
    collapsed: dict[tuple[str, str, str], RelationRecord] = {}
    duplicates = 0
    for line_no, line in _data_lines(path):
        fields = line.split("\t")
        if len(fields) != 5:
            raise ParseError(path, line_no, f"expected 5 tab-separated fields, got {len(fields)}")
        src, dst, rel_kind, year_text, paper_id = fields
        try:
            year = int(year_text)
        except ValueError:
            raise ParseError(path, line_no, f"year is not an integer: {year_text!r}") from None
        try:
            rec = canonical_relation(RelationRecord(src, dst, rel_kind, year, paper_id), concepts)
        except ValidationError as exc:
            raise ValidationError(f"{path}:{line_no}: {exc}") from None
        key = (rec.src, rec.dst, rec.rel_kind)
        existing = collapsed.get(key)
        if existing is None:
            collapsed[key] = rec
        else:
            duplicates += 1
            if rec.year < existing.year:
                collapsed[key] = rec
    if duplicates:
        logger.info("%s: collapsed %d duplicate relation(s) to their earliest year", path, duplicates)
    return list(collapsed.values())


def save_relations(records: list[RelationRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(f"{rec.src}\t{rec.dst}\t{rec.rel_kind}\t{rec.year}\t{rec.paper_id}\n")


def temporal_split(relations: list[RelationRecord], concepts: ConceptTable,
                   cutoff_year: int) -> SplitDataset:
    """Split by year: train gets year <= cutoff, test the rest.

    Task-Method test pairs already present in train are removed; the
    removed count is recorded on the dataset.
    """
    train = [r for r in relations if r.year <= cutoff_year]
    late = [r for r in relations if r.year > cutoff_year]
    train_pairs = {r.pair for r in train if r.rel_kind == TASK_METHOD}
    test: list[RelationRecord] = []
    removed = 0
    for rec in late:
        if rec.rel_kind == TASK_METHOD and rec.pair in train_pairs:
            removed += 1
            continue
        test.append(rec)
    return SplitDataset(train=train, test=test, concepts=concepts,
                        cutoff_year=cutoff_year, removed_seen_pairs=removed)


def _side_counts(records: list[RelationRecord], concepts: ConceptTable):
    tasks: set[str] = set()
    methods: set[str] = set()
    pairs: set[tuple[str, str]] = set()
    for rec in records:
        for endpoint in (rec.src, rec.dst):
            if concepts.kind_of(endpoint) == TASK:
                tasks.add(endpoint)
            else:
                methods.add(endpoint)
        if rec.rel_kind == TASK_METHOD:
            pairs.add(rec.pair)
    return tasks, methods, pairs


def dataset_stats(ds: SplitDataset) -> SplitStats:
    """Distinct Task/Method/pair counts per split side.

    Concepts are counted when they appear as an endpoint of any relation
    on that side, regardless of relation kind.
    """
    train_tasks, train_methods, train_pairs = _side_counts(ds.train, ds.concepts)
    test_tasks, test_methods, test_pairs = _side_counts(ds.test, ds.concepts)
    seen = train_tasks | train_methods
    unseen = (test_tasks | test_methods) - seen
    return SplitStats(
        cutoff_year=ds.cutoff_year,
        train_records=len(ds.train),
        test_records=len(ds.test),
        train_tasks=len(train_tasks),
        train_methods=len(train_methods),
        train_pairs=len(train_pairs),
        test_tasks=len(test_tasks),
        test_methods=len(test_methods),
        test_pairs=len(test_pairs),
        test_unseen_concepts=len(unseen),
        removed_seen_pairs=ds.removed_seen_pairs,
    )


def write_split_manifest(ds: SplitDataset, path, extra_lines: list[str] | None = None) -> None:
    stats = dataset_stats(ds)
    with open(path, "w", encoding="utf-8") as fh:
        for line in stats.as_lines():
            fh.write(line + "\n")
        for line in extra_lines or []:
            fh.write(line + "\n")

import json

import pytest

from negare import corpus
from negare.corpus import (
    CorpusError,
    EntityAnnotation,
    ExclusionReason,
    FilterConfig,
    Label,
    LoadIssue,
    Record,
    RecordCategory,
)
from negare.errors import NegareError


def entity(eid, start, end, surface, label=Label.NOT_NEGATED):
    return EntityAnnotation(
        entity_id=eid, start=start, end=end, surface=surface, gold_label=label
    )


def record(rid, text, entities=(), category=RecordCategory.GENERAL_PRACTITIONER):
    return Record(id=rid, category=category, text=text, entities=tuple(entities))


def record_obj(rid="r1", text="geen koorts", entities=None, category="gp"):
    if entities is None:
        entities = [
            {
                "entity_id": "e1",
                "start": 5,
                "end": 11,
                "surface": "koorts",
                "gold_label": "negated",
            }
        ]
    return {"id": rid, "category": category, "text": text, "entities": entities}


def write_jsonl(path, objs):
    path.write_text(
        "".join(json.dumps(o, ensure_ascii=False) + "\n" for o in objs),
        encoding="utf-8",
    )


class TestRecordInvariants:
    def test_well_formed(self):
        r = record("r1", "geen koorts", [entity("e1", 5, 11, "koorts")])
        assert r.entities[0].surface == "koorts"

    def test_span_out_of_bounds_names_record_and_offset(self):
        with pytest.raises(CorpusError, match=r"r1.*e1.*\[5, 99\).*length 11"):
            record("r1", "geen koorts", [entity("e1", 5, 99, "koorts")])

    def test_start_not_before_end(self):
        with pytest.raises(CorpusError):
            record("r1", "geen koorts", [entity("e1", 7, 7, "")])

    def test_surface_mismatch(self):
        with pytest.raises(CorpusError, match="surface mismatch"):
            record("r1", "geen koorts", [entity("e1", 5, 11, "koortz")])

    def test_duplicate_entity_id(self):
        with pytest.raises(CorpusError, match="duplicate entity id"):
            record(
                "r1",
                "geen koorts",
                [entity("e1", 0, 4, "geen"), entity("e1", 5, 11, "koorts")],
            )

    def test_empty_record_id(self):
        with pytest.raises(CorpusError):
            record("", "tekst")


class TestLoadCorpus:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [record_obj("r1"), record_obj("r2")])
        loaded = corpus.load_corpus(path)
        assert [r.id for r in loaded] == ["r1", "r2"]
        assert loaded[0].entities[0].gold_label is Label.NEGATED

        out = tmp_path / "copy.jsonl"
        corpus.write_corpus(loaded, out)
        assert corpus.load_corpus(out) == loaded

    def test_bounds_violation_reported_with_line(self, tmp_path):
        path = tmp_path / "c.jsonl"
        bad = record_obj("r2")
        bad["entities"][0]["end"] = 99
        write_jsonl(path, [record_obj("r1"), bad])
        with pytest.raises(CorpusError, match="line 2.*r2"):
            corpus.load_corpus(path)

    def test_surface_mismatch_flags_exactly_that_record(self, tmp_path):
        path = tmp_path / "c.jsonl"
        bad = record_obj("r2", text="geen koortz")
        write_jsonl(path, [record_obj("r1"), bad, record_obj("r3")])
        loaded, issues = corpus.load_corpus_with_issues(path)
        assert [r.id for r in loaded] == ["r1", "r3"]
        assert len(issues) == 1
        assert issues[0].record_id == "r2"
        assert "surface" in issues[0].message

    def test_invalid_json_line(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": "r1"\n', encoding="utf-8")
        loaded, issues = corpus.load_corpus_with_issues(path)
        assert loaded == []
        assert issues[0].line_number == 1

    def test_unknown_category(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [record_obj("r1", category="email")])
        with pytest.raises(CorpusError, match="unknown category"):
            corpus.load_corpus(path)

    def test_duplicate_record_id(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [record_obj("r1"), record_obj("r1")])
        _, issues = corpus.load_corpus_with_issues(path)
        assert any("duplicate record id" in issue.message for issue in issues)


class TestFilterCorpus:
    def test_no_annotation_excluded(self):
        kept, report = corpus.filter_corpus([record("r1", "tekst zonder entiteit")])
        assert kept == []
        assert report.record_count(ExclusionReason.NO_ANNOTATION) == 1

    def test_over_length_record_excluded_with_entities(self):
        text = " ".join(["woord"] * 600)
        r = record("r1", text, [entity("e1", 0, 5, "woord")])
        kept, report = corpus.filter_corpus([r])
        assert kept == []
        assert report.record_count(ExclusionReason.OVER_LENGTH) == 1
        assert report.entity_count(ExclusionReason.OVER_LENGTH) == 1

    def test_max_tokens_boundary_inclusive(self):
        text = " ".join(["woord"] * 512)
        r = record("r1", text, [entity("e1", 0, 5, "woord")])
        kept, _ = corpus.filter_corpus([r])
        assert len(kept) == 1

    def test_clean_corpus_identity(self):
        r = record("r1", "geen koorts", [entity("e1", 5, 11, "koorts")])
        kept, report = corpus.filter_corpus([r])
        assert kept == [r]
        assert report.kept_records == report.input_records == 1
        assert not report.excluded_records

    def test_not_single_term_excluded(self):
        text = "dit is een veel te lange beschrijving van een klacht hier"
        r = record("r1", text, [entity("e1", 0, len(text), text)])
        kept, report = corpus.filter_corpus([r])
        assert kept == []
        assert report.record_count(ExclusionReason.NOT_SINGLE_TERM) == 1

    def test_corrupted_issues_counted(self):
        issues = [LoadIssue(3, "rX", "surface mismatch")]
        kept, report = corpus.filter_corpus([], corrupted=issues)
        assert report.record_count(ExclusionReason.CORRUPTED_SOURCE) == 1
        assert report.input_records == 1

    def test_idempotent(self):
        records = [
            record("r1", "geen koorts", [entity("e1", 5, 11, "koorts")]),
            record("r2", "leeg"),
            record("r3", " ".join(["w"] * 600), [entity("e1", 0, 1, "w")]),
        ]
        once, _ = corpus.filter_corpus(records)
        twice, report = corpus.filter_corpus(once)
        assert twice == once
        assert not report.excluded_records

    def test_accounting_reconciles(self):
        records = [
            record("r1", "geen koorts", [entity("e1", 5, 11, "koorts")]),
            record("r2", "leeg"),
        ]
        _, report = corpus.filter_corpus(
            records, corrupted=[LoadIssue(9, None, "bad json")]
        )
        report.verify()
        assert report.input_records == 3
        assert report.kept_records == 1

    def test_report_render_forms(self):
        _, report = corpus.filter_corpus([record("r1", "leeg")])
        assert "no_annotation" in report.to_table()
        rows = [json.loads(line) for line in report.to_jsonl().splitlines()]
        assert {"reason": "kept", "records": 0, "entities": 0} in rows


class TestCorpusStats:
    def test_hand_counted_example(self):
        stats = corpus.corpus_stats([record("r1", "a b. c")])
        cat = stats.categories[0]
        assert cat.sentences.total == 2
        assert cat.words.total == 3
        assert cat.unique_words.total == 3
        assert cat.word_length.mean == pytest.approx(1.0)

    def test_replication_doubles_totals(self):
        single = corpus.corpus_stats([record("r1", "a b. c")]).categories[0]
        double = corpus.corpus_stats(
            [record("r1", "a b. c"), record("r2", "a b. c")]
        ).categories[0]
        assert double.words.total == 2 * single.words.total
        assert double.words.mean == single.words.mean

    def test_repeated_word_unique_count(self):
        cat = corpus.corpus_stats([record("r1", "pijn pijn")]).categories[0]
        assert cat.words.total == 2
        assert cat.unique_words.total == 1

    def test_unique_words_casefolded(self):
        cat = corpus.corpus_stats([record("r1", "Pijn pijn")]).categories[0]
        assert cat.unique_words.total == 1

    def test_punctuation_not_words(self):
        cat = corpus.corpus_stats([record("r1", "a , b .")]).categories[0]
        assert cat.words.total == 2

    def test_totals_additive_across_disjoint_corpora(self):
        a = [record("r1", "geen koorts. wel hoest")]
        b = [record("r2", "alles rustig vandaag")]
        sa = corpus.corpus_stats(a).categories[0]
        sb = corpus.corpus_stats(b).categories[0]
        sab = corpus.corpus_stats(a + b).categories[0]
        assert sab.words.total == sa.words.total + sb.words.total
        assert sab.sentences.total == sa.sentences.total + sb.sentences.total

    def test_quartiles_linear_interpolation(self):
        records = [
            record(f"r{i}", " ".join(["w"] * n)) for i, n in enumerate([1, 2, 3, 4])
        ]
        cat = corpus.corpus_stats(records).categories[0]
        assert cat.words.q1 == pytest.approx(1.75)
        assert cat.words.q3 == pytest.approx(3.25)

    def test_empty_corpus_rejected(self):
        with pytest.raises(NegareError):
            corpus.corpus_stats([])

    def test_category_rows_pool_by_category(self):
        records = [
            record("r1", "a b", category=RecordCategory.RADIOLOGY_REPORT),
            record("r2", "c d e", category=RecordCategory.DISCHARGE_LETTER),
        ]
        stats = corpus.corpus_stats(records)
        names = [c.category for c in stats.categories]
        assert names == [
            RecordCategory.DISCHARGE_LETTER,
            RecordCategory.RADIOLOGY_REPORT,
        ]


class TestSplitFolds:
    def make(self, n):
        return [record(f"r{i:03d}", "tekst") for i in range(n)]

    def test_pigeonhole(self):
        folds = corpus.split_folds(self.make(10), k=10, seed=42)
        assert sorted(folds.fold_sizes()) == [1] * 10

    def test_deterministic(self):
        a = corpus.split_folds(self.make(50), k=10, seed=42)
        b = corpus.split_folds(self.make(50), k=10, seed=42)
        assert a.assignment == b.assignment

    def test_seed_changes_assignment(self):
        a = corpus.split_folds(self.make(50), k=10, seed=42)
        b = corpus.split_folds(self.make(50), k=10, seed=43)
        assert a.assignment != b.assignment

    def test_23_records_balanced(self):
        folds = corpus.split_folds(self.make(23), k=10, seed=42)
        assert sorted(folds.fold_sizes(), reverse=True) == [3, 3, 3, 2, 2, 2, 2, 2, 2, 2]

    def test_order_independent(self):
        records = self.make(30)
        a = corpus.split_folds(records, k=5, seed=1)
        b = corpus.split_folds(list(reversed(records)), k=5, seed=1)
        assert a.assignment == b.assignment

    def test_k_too_large(self):
        with pytest.raises(NegareError):
            corpus.split_folds(self.make(5), k=10, seed=42)

    def test_k_too_small(self):
        with pytest.raises(NegareError):
            corpus.split_folds(self.make(5), k=1, seed=42)

    def test_file_round_trip(self, tmp_path):
        folds = corpus.split_folds(self.make(23), k=10, seed=42)
        path = tmp_path / "folds.tsv"
        corpus.write_folds(folds, path)
        loaded = corpus.read_folds(path)
        assert loaded == folds
        header = path.read_text(encoding="utf-8").splitlines()[:2]
        assert header == ["#k: 10", "#seed: 42"]

    def test_read_rejects_missing_header(self, tmp_path):
        path = tmp_path / "folds.tsv"
        path.write_text("r1\t0\n", encoding="utf-8")
        with pytest.raises(NegareError, match="missing #k/#seed"):
            corpus.read_folds(path)

    def test_read_rejects_out_of_range_fold(self, tmp_path):
        path = tmp_path / "folds.tsv"
        path.write_text("#k: 2\n#seed: 1\nr1\t5\n", encoding="utf-8")
        with pytest.raises(NegareError, match="out of range"):
            corpus.read_folds(path)

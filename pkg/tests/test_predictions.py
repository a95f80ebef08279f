import itertools
import random

import pytest

from negare import predictions as pr
from negare.corpus import EntityAnnotation, Label, Record, RecordCategory
from negare.predictions import (
    Prediction,
    PredictionError,
    PredictionSet,
    disagreement_partition,
    majority_vote,
    read_predictions,
    write_predictions,
)


def pset(method, labels, threshold=0.5, scores=None):
    """labels: {(rid, eid): Label}"""
    preds = []
    for (rid, eid), label in labels.items():
        score = None if scores is None else scores[(rid, eid)]
        preds.append(Prediction(record_id=rid, entity_id=eid, label=label, score=score))
    return PredictionSet(method=method, threshold=threshold, predictions=tuple(preds))


def gold_corpus(labels):
    """labels: {(rid, eid): Label} -> one-record-per-rid corpus."""
    by_record = {}
    for (rid, eid), label in labels.items():
        by_record.setdefault(rid, []).append((eid, label))
    records = []
    for rid, ents in sorted(by_record.items()):
        text = " ".join("koorts" for _ in ents)
        entities = []
        for i, (eid, label) in enumerate(sorted(ents)):
            start = i * 7
            entities.append(
                EntityAnnotation(
                    entity_id=eid,
                    start=start,
                    end=start + 6,
                    surface="koorts",
                    gold_label=label,
                )
            )
        records.append(
            Record(
                id=rid,
                category=RecordCategory.GENERAL_PRACTITIONER,
                text=text,
                entities=tuple(entities),
            )
        )
    return records


N = Label.NEGATED
P = Label.NOT_NEGATED


class TestPredictionSet:
    def test_sorted_on_construction(self):
        ps = pset("m", {("b", "e1"): N, ("a", "e2"): P, ("a", "e1"): N})
        assert [p.key for p in ps.predictions] == [
            ("a", "e1"),
            ("a", "e2"),
            ("b", "e1"),
        ]

    def test_duplicate_key_rejected(self):
        with pytest.raises(PredictionError, match="duplicate"):
            PredictionSet(
                method="m",
                threshold=0.5,
                predictions=(
                    Prediction("r", "e", N),
                    Prediction("r", "e", P),
                ),
            )

    def test_score_label_consistency_enforced(self):
        with pytest.raises(PredictionError, match="contradicts"):
            PredictionSet(
                method="m",
                threshold=0.5,
                predictions=(Prediction("r", "e", P, score=0.7),),
            )

    def test_score_at_threshold_is_negated(self):
        ps = PredictionSet(
            method="m",
            threshold=0.5,
            predictions=(Prediction("r", "e", N, score=0.5),),
        )
        assert ps.label_of("r", "e") is N

    def test_manifest_order_independent(self):
        a = pset("m", {("r1", "e1"): N, ("r2", "e1"): P})
        b = pset("m2", {("r2", "e1"): N, ("r1", "e1"): N})
        assert a.manifest == b.manifest

    def test_manifest_differs_on_coverage(self):
        a = pset("m", {("r1", "e1"): N})
        b = pset("m", {("r1", "e2"): N})
        assert a.manifest != b.manifest


class TestFileFormat:
    def test_round_trip(self, tmp_path):
        ps = pset(
            "rule_based",
            {("r1", "e1"): N, ("r1", "e2"): P, ("r2", "e1"): N},
            scores={("r1", "e1"): 0.9, ("r1", "e2"): 0.1, ("r2", "e1"): 0.5},
        )
        path = tmp_path / "p.tsv"
        write_predictions(ps, path)
        assert read_predictions(path) == ps

    def test_header_contents(self, tmp_path):
        ps = pset("rule_based", {("r1", "e1"): N})
        path = tmp_path / "p.tsv"
        write_predictions(ps, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "#method: rule_based"
        assert lines[1] == "#threshold: 0.5"
        assert lines[2] == f"#manifest: {ps.manifest}"
        assert lines[3] == "r1\te1\tnegated"

    def test_duplicate_line_rejected(self, tmp_path):
        path = tmp_path / "p.tsv"
        path.write_text(
            "#method: m\n#threshold: 0.5\nr1\te1\tnegated\nr1\te1\tnegated\n",
            encoding="utf-8",
        )
        with pytest.raises(PredictionError, match="duplicate"):
            read_predictions(path)

    def test_score_threshold_contradiction_rejected(self, tmp_path):
        path = tmp_path / "p.tsv"
        path.write_text(
            "#method: m\n#threshold: 0.5\nr1\te1\tnot_negated\t0.7\n",
            encoding="utf-8",
        )
        with pytest.raises(PredictionError, match="contradicts"):
            read_predictions(path)

    def test_manifest_mismatch_names_both_hashes(self, tmp_path):
        path = tmp_path / "p.tsv"
        bogus = "0" * 64
        path.write_text(
            f"#method: m\n#threshold: 0.5\n#manifest: {bogus}\nr1\te1\tnegated\n",
            encoding="utf-8",
        )
        with pytest.raises(PredictionError) as exc:
            read_predictions(path)
        assert bogus in str(exc.value)

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "p.tsv"
        path.write_text("r1\te1\tnegated\n", encoding="utf-8")
        with pytest.raises(PredictionError, match="header"):
            read_predictions(path)

    def test_unknown_label_rejected(self, tmp_path):
        path = tmp_path / "p.tsv"
        path.write_text(
            "#method: m\n#threshold: 0.5\nr1\te1\tmaybe\n", encoding="utf-8"
        )
        with pytest.raises(PredictionError, match="unknown label"):
            read_predictions(path)

    def test_byte_stable_output(self, tmp_path):
        ps = pset("m", {("r2", "e1"): N, ("r1", "e9"): P, ("r1", "e10"): N})
        a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
        write_predictions(ps, a)
        write_predictions(ps, b)
        assert a.read_bytes() == b.read_bytes()


class TestMajorityVote:
    KEY = ("r1", "e1")

    def vote(self, la, lb, lc):
        out = majority_vote(
            pset("a", {self.KEY: la}),
            pset("b", {self.KEY: lb}),
            pset("c", {self.KEY: lc}),
        )
        return out.label_of(*self.KEY)

    def test_two_of_three_negated(self):
        assert self.vote(N, N, P) is N

    def test_unanimous_not_negated(self):
        assert self.vote(P, P, P) is P

    def test_full_truth_table(self):
        for combo in itertools.product([N, P], repeat=3):
            expected = N if sum(label is N for label in combo) >= 2 else P
            assert self.vote(*combo) is expected

    def test_permutation_invariant(self):
        labels = {("r1", "e1"): N, ("r1", "e2"): P, ("r2", "e1"): N}
        flipped = {("r1", "e1"): P, ("r1", "e2"): P, ("r2", "e1"): N}
        mixed = {("r1", "e1"): N, ("r1", "e2"): N, ("r2", "e1"): P}
        sets = [pset("a", labels), pset("b", flipped), pset("c", mixed)]
        outputs = set()
        for perm in itertools.permutations(sets):
            out = majority_vote(*perm)
            outputs.add(tuple(p.label for p in out.predictions))
        assert len(outputs) == 1

    def test_identical_inputs_idempotent(self):
        labels = {("r1", "e1"): N, ("r2", "e1"): P}
        out = majority_vote(pset("a", labels), pset("b", labels), pset("c", labels))
        assert [p.label for p in out.predictions] == [N, P]

    def test_single_dissent_never_changes_output(self):
        labels = {("r1", "e1"): N, ("r1", "e2"): P}
        base = majority_vote(pset("a", labels), pset("b", labels), pset("c", labels))
        dissent = {("r1", "e1"): P, ("r1", "e2"): N}
        flipped = majority_vote(pset("a", labels), pset("b", labels), pset("c", dissent))
        assert [p.label for p in base.predictions] == [
            p.label for p in flipped.predictions
        ]

    def test_method_name_records_members(self):
        labels = {("r1", "e1"): N}
        out = majority_vote(pset("x", labels), pset("y", labels), pset("z", labels))
        assert out.method == "voting_ensemble(x+y+z)"

    def test_no_scores_emitted(self):
        labels = {("r1", "e1"): N}
        out = majority_vote(pset("a", labels), pset("b", labels), pset("c", labels))
        assert all(p.score is None for p in out.predictions)

    def test_coverage_mismatch_rejected(self):
        a = pset("a", {("r1", "e1"): N})
        b = pset("b", {("r1", "e1"): N})
        c = pset("c", {("r1", "e2"): N})
        with pytest.raises(PredictionError, match="coverage"):
            majority_vote(a, b, c)


class TestDisagreementPartition:
    def test_perfect_sets_empty(self):
        gold_labels = {("r1", "e1"): N, ("r1", "e2"): P}
        gold = gold_corpus(gold_labels)
        sets = [pset(m, gold_labels) for m in ("a", "b", "c")]
        partition = disagreement_partition(sets, gold)
        assert partition.total() == 0

    def test_single_method_single_error(self):
        gold_labels = {("r1", "e1"): N, ("r1", "e2"): P}
        gold = gold_corpus(gold_labels)
        wrong = dict(gold_labels)
        wrong[("r1", "e2")] = N
        sets = [pset("a", gold_labels), pset("b", gold_labels), pset("c", wrong)]
        partition = disagreement_partition(sets, gold)
        assert partition.cell("c") == 1
        assert partition.total() == 1

    def test_cells_sum_to_error_union(self):
        rng = random.Random(7)
        keys = [("r1", f"e{i}") for i in range(50)]
        gold_labels = {k: rng.choice([N, P]) for k in keys}
        gold = gold_corpus(gold_labels)
        sets = []
        for m in ("a", "b", "c"):
            sets.append(pset(m, {k: rng.choice([N, P]) for k in keys}))
        partition = disagreement_partition(sets, gold)
        union = set()
        for s in sets:
            union |= {k for k in keys if s.by_key[k].label is not gold_labels[k]}
        assert partition.total() == len(union)

    def test_cells_disjoint_by_construction(self):
        gold_labels = {("r1", "e1"): N, ("r1", "e2"): N, ("r1", "e3"): P}
        gold = gold_corpus(gold_labels)
        all_wrong = {k: (P if v is N else N) for k, v in gold_labels.items()}
        sets = [pset("a", all_wrong), pset("b", gold_labels), pset("c", all_wrong)]
        partition = disagreement_partition(sets, gold)
        assert partition.cell("a", "c") == 3
        assert partition.cell("a") == 0
        assert partition.total() == 3

    def test_duplicate_method_names_rejected(self):
        labels = {("r1", "e1"): N}
        sets = [pset("a", labels), pset("a", labels)]
        with pytest.raises(PredictionError, match="duplicate method"):
            disagreement_partition(sets, gold_corpus(labels))

    def test_render_forms(self):
        gold_labels = {("r1", "e1"): N}
        gold = gold_corpus(gold_labels)
        wrong = {("r1", "e1"): P}
        sets = [pset("a", wrong), pset("b", gold_labels), pset("c", gold_labels)]
        partition = disagreement_partition(sets, gold)
        assert "a" in partition.to_table()
        assert '"entities": 1' in partition.to_jsonl()

import pytest

from rulepatch.data import DataError, Dataset, load_csv, partition, train_test_split
from rulepatch.rules import NUMERIC, Feature, Schema


def write_csv(path, text):
    path.write_text(text)
    return path


class TestLoadCsv:
    def test_tic_tac_toe_shape(self, ttt, tmp_path):
        path = tmp_path / "ttt.csv"
        ttt.save_csv(path)
        loaded = load_csv(path, schema=ttt.schema, label_column="class")
        assert len(loaded) == 958
        assert len(loaded.schema.features) == 9
        assert all(f.kind == "categorical" for f in loaded.schema.features)

    def test_banknote_shape(self, banknote, tmp_path):
        path = tmp_path / "bn.csv"
        banknote.save_csv(path)
        loaded = load_csv(path, schema=banknote.schema, label_column="class")
        assert len(loaded) == 1372
        assert all(f.kind == "numeric" for f in loaded.schema.features)

    def test_three_label_values_rejected(self, tmp_path):
        path = write_csv(tmp_path / "bad.csv", "a,label\n1,x\n2,y\n3,z\n")
        with pytest.raises(DataError):
            load_csv(path)

    def test_type_inference(self, tmp_path):
        path = write_csv(tmp_path / "mix.csv", "a,b,label\n1,red,n\n2.5,blue,y\n")
        ds = load_csv(path)
        kinds = {f.name: f.kind for f in ds.schema.features}
        assert kinds == {"a": "numeric", "b": "categorical"}

    def test_row_arity_mismatch(self, tmp_path):
        path = write_csv(tmp_path / "bad.csv", "a,label\n1,n,extra\n")
        with pytest.raises(DataError):
            load_csv(path)

    def test_save_load_round_trip_is_lossless(self, banknote, tmp_path):
        path = tmp_path / "bn.csv"
        banknote.save_csv(path)
        loaded = load_csv(path, schema=banknote.schema, label_column="class")
        assert loaded.rows == banknote.rows
        assert loaded.labels == banknote.labels


class TestSplit:
    def test_floor_arithmetic(self, banknote):
        train, test = train_test_split(banknote, 0.8, seed=0)
        assert len(train) == int(0.8 * len(banknote))
        assert len(train) + len(test) == len(banknote)

    def test_same_seed_is_deterministic(self, banknote):
        a = train_test_split(banknote, 0.8, seed=3)
        b = train_test_split(banknote, 0.8, seed=3)
        assert a[0].rows == b[0].rows and a[1].labels == b[1].labels

    def test_different_seeds_differ(self, banknote):
        orders = set()
        for seed in range(50):
            train, _ = train_test_split(banknote, 0.8, seed=seed)
            orders.add(tuple(id(r) for r in train.rows[:20]))
        assert len(orders) == 50

    def test_row_label_pairing_preserved(self, ttt):
        pairs = {(tuple(sorted(r.items())), l) for r, l in zip(ttt.rows, ttt.labels)}
        train, test = train_test_split(ttt, 0.8, seed=7)
        got = {
            (tuple(sorted(r.items())), l)
            for part in (train, test)
            for r, l in zip(part.rows, part.labels)
        }
        assert got == pairs

    def test_invalid_fraction(self, ttt):
        with pytest.raises(DataError):
            train_test_split(ttt, 1.0, seed=0)


class TestPartition:
    def small(self, n):
        schema = Schema([Feature("x", NUMERIC)], ("neg", "pos"))
        rows = [{"x": float(i)} for i in range(n)]
        return Dataset(schema, "label", rows, ["neg"] * n)

    def test_remainder_spread(self):
        parts = partition(self.small(10), 4)
        assert [len(p) for p in parts] == [3, 3, 2, 2]

    def test_concatenation_restores_original_order(self):
        ds = self.small(11)
        parts = partition(ds, 3)
        assert Dataset.concat(parts).rows == ds.rows

    def test_k_equals_one_is_identity(self):
        ds = self.small(5)
        (only,) = partition(ds, 1)
        assert only.rows == ds.rows

    def test_k_exceeding_n_rejected(self):
        with pytest.raises(DataError):
            partition(self.small(3), 4)

"""Regenerate the bundled UCI files from scikit-learn's offline copies.

scikit-learn corrects two iris rows (35 and 38) relative to the UCI
``iris.data`` distribution; the UCI values are restored here so the file
matches what the UCI repository serves.
"""
from pathlib import Path

from sklearn.datasets import load_breast_cancer, load_iris

OUT = Path(__file__).resolve().parents[1] / "data"

UCI_IRIS_ROWS = {34: (4.9, 3.1, 1.5, 0.1), 37: (4.9, 3.1, 1.5, 0.1)}


def write_iris():
    bunch = load_iris()
    names = ["Iris-setosa", "Iris-versicolor", "Iris-virginica"]
    lines = []
    for i, (row, t) in enumerate(zip(bunch.data, bunch.target)):
        row = UCI_IRIS_ROWS.get(i, tuple(row))
        lines.append(",".join(repr(float(v)) for v in row) + "," + names[t])
    (OUT / "iris.csv").write_text("\n".join(lines) + "\n")


def write_wdbc():
    bunch = load_breast_cancer()
    header = [n.replace(" ", "_") for n in bunch.feature_names] + ["diagnosis"]
    lines = [",".join(header)]
    for row, t in zip(bunch.data, bunch.target):
        lines.append(",".join(repr(float(v)) for v in row) + "," + ("M" if t == 0 else "B"))
    (OUT / "wdbc.csv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    write_iris()
    write_wdbc()

"""Regenerates optics_reference.txt from scikit-learn's OPTICS (xi extraction).

Run from this directory: python3 gen_optics_reference.py > optics_reference.txt
"""
import numpy as np
import sklearn
from sklearn.cluster import OPTICS


def instances(rng):
    for i in range(60):
        n = int(rng.integers(5, 41))
        if i % 3 == 0:
            pts = rng.normal(size=(n, 2))
        else:
            k = int(rng.integers(2, 5))
            centres = rng.normal(scale=4.0, size=(k, 2))
            pts = centres[rng.integers(0, k, size=n)] + rng.normal(scale=rng.uniform(0.2, 1.0), size=(n, 2))
        d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
        d /= d.max()
        np.fill_diagonal(d, 0.0)
        yield d, int(rng.integers(2, 7))


def main():
    rng = np.random.default_rng(20240917)
    print(f"# scikit-learn {sklearn.__version__} OPTICS(metric=precomputed, max_eps=inf, xi=0.05)")
    for idx, (d, m) in enumerate(instances(rng)):
        n = d.shape[0]
        model = OPTICS(min_samples=m, max_eps=np.inf, metric="precomputed", cluster_method="xi", xi=0.05).fit(d)
        print(f"instance {idx} {n} {m}")
        for row in d:
            print(" ".join(repr(float(v)) for v in row))
        print("ordering " + " ".join(str(int(v)) for v in model.ordering_))
        print("reachability " + " ".join("inf" if np.isinf(v) else repr(float(v)) for v in model.reachability_))
        print("labels " + " ".join(str(int(v)) for v in model.labels_))


if __name__ == "__main__":
    main()

"""Confusion-matrix metrics for binary detectors."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Confusion:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self):
        return self.tp + self.tn + self.fp + self.fn

    # zero denominators yield 0.0 rather than raising

    @property
    def accuracy(self):
        return (self.tp + self.tn) / self.total if self.total else 0.0

    @property
    def sensitivity(self):
        d = self.tp + self.fn
        return self.tp / d if d else 0.0

    @property
    def specificity(self):
        d = self.tn + self.fp
        return self.tn / d if d else 0.0

    @property
    def precision(self):
        d = self.tp + self.fp
        return self.tp / d if d else 0.0

    def as_dict(self):
        return {"tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn,
                "accuracy": self.accuracy, "sensitivity": self.sensitivity,
                "specificity": self.specificity, "precision": self.precision}


def confusion(y_true, y_pred) -> Confusion:
    tp = tn = fp = fn = 0
    for t, p in zip(y_true, y_pred):
        t, p = bool(t), bool(p)
        if t and p:
            tp += 1
        elif t:
            fn += 1
        elif p:
            fp += 1
        else:
            tn += 1
    return Confusion(tp, tn, fp, fn)

"""Render publication-style figures from mrw-fluct CSV dumps.

Three plot kinds, one console script each:

- ``cdf-compare``  (columns x, F_empirical, F_reference): empirical CDF as a
  step curve with the reference CDF overlaid.
- ``curve``        (columns n, value): a quantity traced against the horizon.
- ``histogram-with-density`` (columns path_index, n, value): histogram of the
  per-path values, optionally overlaid with the arcsine-type density for a
  given theta.

Rendering is a pure function of the CSV bytes and the spec: fixed figure
size, DPI, style and fonts, so repeated runs are pixel-identical on one
platform.  The scripts consume only the documented CSV schemas; they never
touch model files or the simulation package.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("cdf-compare", "curve", "histogram-with-density")

EXPECTED_COLUMNS = {
    "cdf-compare": ("x", "F_empirical", "F_reference"),
    "curve": ("n", "value"),
    "histogram-with-density": ("path_index", "n", "value"),
}

FIGSIZE = (6.4, 4.0)
DPI = 100


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    kind: str
    output_image: str
    title: str = ""
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}; expected one of {KINDS}")


class ColumnError(ValueError):
    """Raised when the CSV header does not match the plot kind."""


def _read_columns(path: str, expected) -> dict:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ColumnError(
                f"{path}: file is empty; expected header {', '.join(expected)}"
            ) from None
        missing = [c for c in expected if c not in header]
        if missing:
            raise ColumnError(
                f"{path}: missing column(s) {', '.join(missing)}; "
                f"expected {', '.join(expected)}, found {', '.join(header) or '(none)'}"
            )
        idx = {c: header.index(c) for c in expected}
        rows = [row for row in reader if row]
    if not rows:
        raise ColumnError(f"{path}: no data rows under header {', '.join(header)}")
    return {
        c: np.array([float(row[i]) for row in rows]) for c, i in idx.items()
    }


def _arcsine_density(theta: float, x: np.ndarray) -> np.ndarray:
    inside = (x > 0.0) & (x < 1.0)
    xs = np.where(inside, x, 0.5)
    return np.where(
        inside,
        math.sin(math.pi * theta) / math.pi * xs ** (theta - 1) * (1 - xs) ** (-theta),
        0.0,
    )


def _new_figure(title: str):
    plt.rcdefaults()
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    if title:
        ax.set_title(title)
    return fig, ax


def _render_cdf_compare(data, spec, ax):
    order = np.argsort(data["x"], kind="stable")
    x = data["x"][order]
    ax.step(x, data["F_empirical"][order], where="post", label="empirical", lw=1.5)
    ax.plot(x, data["F_reference"][order], label="reference", lw=1.5, ls="--")
    ax.set_xlabel("x")
    ax.set_ylabel("F(x)")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="lower right")


def _render_curve(data, spec, ax):
    order = np.argsort(data["n"], kind="stable")
    ax.plot(data["n"][order], data["value"][order], marker="o", ms=3, lw=1.2)
    ax.set_xlabel("n")
    ax.set_ylabel("value")


def _render_histogram(data, spec, ax):
    values = data["value"]
    ax.hist(values, bins=40, range=(0.0, 1.0), density=True, alpha=0.7,
            color="#4878cf", edgecolor="white", label="samples")
    if spec.theta is not None:
        grid = np.linspace(0.002, 0.998, 499)
        ax.plot(grid, _arcsine_density(spec.theta, grid), color="#d65f5f",
                lw=1.5, label=f"density (theta={spec.theta:g})")
        ax.legend(loc="upper center")
    ax.set_xlabel("occupation fraction")
    ax.set_ylabel("density")
    ax.set_xlim(0.0, 1.0)


_RENDERERS = {
    "cdf-compare": _render_cdf_compare,
    "curve": _render_curve,
    "histogram-with-density": _render_histogram,
}


def render(spec: PlotSpec) -> str:
    """Render one figure; returns the output path."""
    data = _read_columns(spec.input_csv, EXPECTED_COLUMNS[spec.kind])
    fig, ax = _new_figure(spec.title)
    try:
        _RENDERERS[spec.kind](data, spec, ax)
        fig.savefig(spec.output_image, dpi=DPI)
    finally:
        plt.close(fig)
    return spec.output_image


def _main(kind: str, argv, extra_theta: bool = False) -> int:
    parser = argparse.ArgumentParser(description=f"render a {kind} figure")
    parser.add_argument("input_csv")
    parser.add_argument("output_image")
    parser.add_argument("--title", default="")
    if extra_theta:
        parser.add_argument("--theta", type=float, default=None,
                            help="overlay the arcsine-type density for this theta")
    args = parser.parse_args(argv)
    spec = PlotSpec(
        input_csv=args.input_csv,
        kind=kind,
        output_image=args.output_image,
        title=args.title,
        theta=getattr(args, "theta", None),
    )
    try:
        render(spec)
    except (ColumnError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main_cdf_compare(argv=None) -> int:
    return _main("cdf-compare", argv)


def main_curve(argv=None) -> int:
    return _main("curve", argv)


def main_histogram(argv=None) -> int:
    return _main("histogram-with-density", argv, extra_theta=True)


if __name__ == "__main__":
    sys.exit(main_cdf_compare())

"""Deterministic CSV/JSON writers and generated plotting scripts."""

import json
import os

import numpy as np


def fmt(x) -> str:
    """Shortest round-trip repr of a double, independent of locale."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path, header, columns):
    """Write equal-length columns under a header row naming columns and units."""
    columns = [np.asarray(c) for c in columns]
    n = len(columns[0])
    if any(len(c) != n for c in columns):
        raise ValueError("columns must have equal length")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def write_long_csv(path, header, times, sites, values):
    """(t, n, value) rows, time-major."""
    T, S = values.shape
    t_col = np.repeat(times, S)
    n_col = np.tile(sites, T)
    return write_csv(path, header, [t_col, n_col, values.reshape(-1)])


def write_json(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
    return path


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def rel(out_dir, path):
    return os.path.relpath(path, out_dir).replace(os.sep, "/")


PLOT_SPECTRAL = '''\
"""Three panels: chain eigenfrequencies, spectral density, damping kernel."""
import csv
import os
import sys

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))


def load(name):
    with open(os.path.join(here, name)) as fh:
        rows = list(csv.reader(fh))
    return [list(map(float, col)) for col in zip(*rows[1:])]


idx, freq = load("modes.csv")
w_b, J_b = load("J_binned.csv")
w_k, J_k = load("J_from_kernel.csv")
t, gamma = load("gamma.csv")

fig, ax = plt.subplots(1, 3, figsize=(13, 3.8))
ax[0].plot(idx, freq, ".", ms=3)
ax[0].set_xlabel("mode index")
ax[0].set_ylabel("eigenfrequency")
ax[1].plot(w_b, J_b, label="binned")
ax[1].plot(w_k, J_k, "--", label="from kernel")
ax[1].set_xlabel("omega")
ax[1].set_ylabel("J(omega)")
ax[1].legend()
ax[2].plot(t, gamma, lw=0.7)
ax[2].set_xlabel("t")
ax[2].set_ylabel("gamma(t)")
fig.tight_layout()
fig.savefig(os.path.join(here, "fig_spectral.png"), dpi=150)
if "--show" in sys.argv:
    plt.show()
'''

PLOT_EVOLVE = '''\
"""Mutual information and site energy maps, plus per-site maxima."""
import csv
import os
import sys

import matplotlib.pyplot as plt
import numpy as np

here = os.path.dirname(os.path.abspath(__file__))


def load(name):
    return np.loadtxt(os.path.join(here, name), delimiter=",", skiprows=1, ndmin=2)


def grid(name):
    data = load(name)
    times = np.unique(data[:, 0])
    sites = np.unique(data[:, 1])
    return times, sites, data[:, 2].reshape(len(times), len(sites))


t, n, mi = grid("mi.csv")
_, _, en = grid("energy.csv")
prof = load("profile.csv")

fig, ax = plt.subplots(1, 3, figsize=(14, 4))
ext = [n[0], n[-1], t[0], t[-1]]
ax[0].imshow(mi, origin="lower", aspect="auto", extent=ext)
ax[0].set_title("I(S:n)")
ax[1].imshow(en, origin="lower", aspect="auto", extent=ext)
ax[1].set_title("excess energy E_n")
for a in ax[:2]:
    a.set_xlabel("site n")
    a.set_ylabel("t")
ax[2].semilogy(prof[:, 0], prof[:, 1], color="gray", label="max I(S:n)")
ax[2].semilogy(prof[:, 0], np.abs(prof[:, 2]), color="black", label="max E(n)")
ax[2].set_xlabel("site n")
ax[2].legend()
fig.tight_layout()
fig.savefig(os.path.join(here, "fig_evolve.png"), dpi=150)
if "--show" in sys.argv:
    plt.show()
'''

"""Delimited reports and companion figures.

Every renderer takes plain rows (tuples of numbers and strings), writes
one CSV file and one PNG file under a report directory, and returns the
two paths.  Keeping the inputs plain lets callers compute them in worker
processes and render in the parent.
"""

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def write_csv(report_dir, stem, header, rows):
    """Write header and rows to <report_dir>/<stem>.csv, creating the
    directory if needed.  Returns the file path."""
    os.makedirs(report_dir, exist_ok=True)
    path = os.path.join(report_dir, stem + ".csv")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _save(fig, report_dir, stem):
    path = os.path.join(report_dir, stem + ".png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def degree_count_report(report_dir, stem, rows):
    """Point counts by coefficient extension degree.

    rows: (degree, field_size, count, searched) per extension degree.
    """
    csv_path = write_csv(report_dir, stem,
                         ("degree", "field_size", "count", "searched"), rows)
    degrees = [row[0] for row in rows]
    counts = [row[2] for row in rows]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(degrees, counts, marker="o")
    ax.set_xlabel("extension degree")
    ax.set_ylabel("points")
    ax.set_xticks(degrees)
    ax.grid(True, alpha=0.3)
    png_path = _save(fig, report_dir, stem)
    return csv_path, png_path


def displacement_report(report_dir, stem, rows):
    """Displacement against distance over a ball of vertices.

    rows: (vertex, elementary_divisors, distance, displacement) per
    vertex, with elementary_divisors already formatted as a string.
    """
    csv_path = write_csv(
        report_dir, stem,
        ("vertex", "elementary_divisors", "distance", "displacement"), rows)
    dists = [row[2] for row in rows]
    disps = [row[3] for row in rows]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.scatter(dists, disps, s=18, alpha=0.7)
    ax.set_xlabel("distance from center")
    ax.set_ylabel("displacement")
    ax.grid(True, alpha=0.3)
    png_path = _save(fig, report_dir, stem)
    return csv_path, png_path


def type_histogram_report(report_dir, stem, items):
    """Lattice point tally by relative position.

    items: (label, count) pairs, one per position type.
    """
    csv_path = write_csv(report_dir, stem, ("type", "count"), items)
    labels = [item[0] for item in items]
    counts = [item[1] for item in items]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.bar(range(len(labels)), counts)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=45, ha="right")
    ax.set_ylabel("points")
    png_path = _save(fig, report_dir, stem)
    return csv_path, png_path

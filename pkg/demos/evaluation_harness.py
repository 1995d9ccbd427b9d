"""Round-trip a corpus through files: generate, extract, score.

Writes a small synthetic corpus plus its ground-truth file to a temporary
directory, re-reads the images, runs the full page pipeline on each, and
scores the predictions against the truth. A clean corpus must come back
with a 0% error rate on every row of the report.
"""

import tempfile
from pathlib import Path

from scriptid import (
    analyze_page,
    builtin_profiles,
    format_report,
    generate_corpus,
    load,
    load_ground_truth,
    save_corpus,
    score,
)

arabic = builtin_profiles()[0]
words = generate_corpus(arabic, n_words=12, seed=7)

with tempfile.TemporaryDirectory() as tmp:
    image_paths, truth_path = save_corpus(words, tmp)
    print(f"wrote {len(image_paths)} bitmaps and {Path(truth_path).name} to {tmp}\n")

    truth = load_ground_truth(truth_path)
    predictions = []
    for path in image_paths:
        page = load(path)
        analysis = analyze_page(page)
        predictions.append((path.stem, analysis.features))

    report = score(predictions, truth)
    print(format_report(report))

    worst = max(row.error_rate for row in report.per_feature.values())
    print(f"\nworst error rate: {worst * 100:.2f} %")
    assert worst == 0.0, "a clean synthetic corpus must score perfectly"

"""
/*
 * Software Name : CONTRAST
 * SPDX-License-Identifier: MIT
 *
 * This software is distributed under the MIT license,
 * see the "LICENSE" file for more details
 *
 * Authors: see CONTRIBUTORS.md
 * Software description: CONTRAST: teaching active version-space learners with contrastive examples.
 */
"""

import os
import csv


class SweepRowWriter:
    """
    Writes one CSV row per finished session. The header is written when the
    file is new or empty; ``resume=False`` truncates an existing file first.
    """

    def __init__(self, csv_file, fieldnames, resume=False):
        self.csv_file = csv_file
        self.fieldnames = list(fieldnames)
        self.rows_written = 0
        if not resume and os.path.exists(self.csv_file):
            open(self.csv_file, "w").close()
        if not os.path.exists(self.csv_file) or os.path.getsize(self.csv_file) == 0:
            with open(self.csv_file, "w", newline="", encoding="utf-8") as f:
                csv.writer(f).writerow(self.fieldnames)

    def __call__(self, row: dict):
        with open(self.csv_file, "a", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow([row.get(k, "") for k in self.fieldnames])
        self.rows_written += 1
        return False

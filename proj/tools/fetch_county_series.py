#!/usr/bin/env python3
"""Downloads a county's daily new-case series into the layout of data/*.csv.

Source: the New York Times public county dataset (cumulative counts). Daily
counts are first differences clipped at zero. The output has columns
day,date,cases with day 1 at --start.

    python3 tools/fetch_county_series.py --state Pennsylvania --county Allegheny \
        --start 2020-01-22 --days 200 --out allegheny.csv

Needs network access; the tests never call it.
"""
import argparse
import csv
import datetime as dt
import io
import sys
import urllib.request

DEFAULT_URL = "https://raw.githubusercontent.com/nytimes/covid-19-data/master/us-counties-2020.csv"


def cumulative_counts(url: str, state: str, county: str) -> dict[dt.date, int]:
    with urllib.request.urlopen(url, timeout=60) as response:
        text = response.read().decode("utf-8")
    counts = {}
    for row in csv.DictReader(io.StringIO(text)):
        if row["state"] == state and row["county"] == county:
            counts[dt.date.fromisoformat(row["date"])] = int(row["cases"])
    return counts


def daily_series(cumulative: dict[dt.date, int], start: dt.date, days: int) -> list[int]:
    out = []
    previous = 0
    for i in range(days):
        total = cumulative.get(start + dt.timedelta(days=i), previous)
        out.append(max(total - previous, 0))
        previous = max(total, previous)
    return out


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--state", required=True)
    parser.add_argument("--county", required=True)
    parser.add_argument("--start", type=dt.date.fromisoformat, default=dt.date(2020, 1, 22))
    parser.add_argument("--days", type=int, default=200)
    parser.add_argument("--url", default=DEFAULT_URL)
    parser.add_argument("--out", required=True)
    args = parser.parse_args()

    cumulative = cumulative_counts(args.url, args.state, args.county)
    if not cumulative:
        print(f"no rows for {args.county}, {args.state}", file=sys.stderr)
        return 1
    series = daily_series(cumulative, args.start, args.days)
    with open(args.out, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["day", "date", "cases"])
        for i, cases in enumerate(series):
            writer.writerow([i + 1, (args.start + dt.timedelta(days=i)).isoformat(), cases])
    return 0


if __name__ == "__main__":
    sys.exit(main())

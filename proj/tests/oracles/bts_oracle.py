#!/usr/bin/env python3
"""Synthetic BTS on-time fixture generator and brute-force delay tabulation.

Usage:
  bts_oracle.py generate OUT.csv [--rows N] [--seed S]
  bts_oracle.py tabulate IN.csv OUT.json

The tabulation is a single pass over csv.DictReader rows and shares no code
with the C++ implementation.
"""

import argparse
import csv
import datetime as dt
import json
import random
import sys

CAUSES = ["weather", "nas", "security", "carrier", "late_aircraft"]
CAUSE_COLUMNS = ["WEATHER_DELAY", "NAS_DELAY", "SECURITY_DELAY", "CARRIER_DELAY", "LATE_AIRCRAFT_DELAY"]
WEEKDAYS = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]
HEADER = [
    "YEAR", "FL_DATE", "OP_CARRIER", "OP_CARRIER_FL_NUM", "ORIGIN", "ORIGIN_CITY_NAME", "ORIGIN_STATE_ABR",
    "DEST", "DEP_DELAY", "CANCELLED", "CARRIER_DELAY", "WEATHER_DELAY", "NAS_DELAY", "SECURITY_DELAY",
    "LATE_AIRCRAFT_DELAY",
]
AIRPORTS = [
    ("ATL", "Atlanta, GA", "GA"), ("DFW", "Dallas/Fort Worth, TX", "TX"), ("DEN", "Denver, CO", "CO"),
    ("ORD", "Chicago, IL", "IL"), ("LAX", "Los Angeles, CA", "CA"), ("JFK", "New York, NY", "NY"),
    ("LAS", "Las Vegas, NV", "NV"), ("MCO", "Orlando, FL", "FL"), ("SEA", "Seattle, WA", "WA"),
    ("PHX", "Phoenix, AZ", "AZ"), ("BOS", "Boston, MA", "MA"), ("MDW", "Chicago, IL", "IL"),
]
CARRIERS = {"WN": 0.30, "AA": 0.18, "DL": 0.16, "UA": 0.14, "B6": 0.08, "AS": 0.07, "NK": 0.07}


def generate(path, rows, seed):
    rng = random.Random(seed)
    carriers = list(CARRIERS)
    weights = [CARRIERS[c] for c in carriers]
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\r\n")
        w.writerow(HEADER)
        for i in range(rows):
            carrier = rng.choices(carriers, weights)[0]
            origin, dest = rng.sample(AIRPORTS, 2)
            day = dt.date(2023, 12, 1) + dt.timedelta(days=rng.randrange(31))
            if rng.random() < 0.5:
                date_text = day.isoformat()
            else:
                date_text = f"{day.month}/{day.day}/{day.year} 12:00:00 AM"
            fl_num = str(rng.randrange(1, 60))
            cancelled = rng.random() < 0.02
            causes = [""] * 5
            if cancelled:
                dep_delay = ""
            else:
                r = rng.random()
                if r < 0.55:
                    delay = rng.randint(-20, 0)
                elif r < 0.80:
                    delay = rng.randint(1, 14)
                else:
                    delay = rng.randint(15, 300)
                dep_delay = f"{delay}.00" if rng.random() < 0.7 else str(delay)
                if delay >= 15:
                    split = [0] * 5
                    for _ in range(delay):
                        split[rng.randrange(5)] += 1
                    causes = [f"{m}.00" for m in split]
            row = {
                "YEAR": "2023", "FL_DATE": date_text, "OP_CARRIER": carrier, "OP_CARRIER_FL_NUM": fl_num,
                "ORIGIN": origin[0], "ORIGIN_CITY_NAME": origin[1], "ORIGIN_STATE_ABR": origin[2],
                "DEST": dest[0], "DEP_DELAY": dep_delay, "CANCELLED": "1.00" if cancelled else "0.00",
            }
            for col, val in zip(CAUSE_COLUMNS, causes):
                row[col] = val
            # A few rows the parser must reject.
            if i % 997 == 500:
                row["DEP_DELAY"] = "n/a"
            elif i % 1499 == 700:
                row["ORIGIN_STATE_ABR"] = row["ORIGIN_STATE_ABR"].lower()
            elif i % 1999 == 900:
                row["FL_DATE"] = "2023-13-45"
            w.writerow([row[h] for h in HEADER])


def minutes(text, allow_negative=True):
    """Integral minutes or None for empty; raises ValueError when invalid."""
    text = text.strip()
    if text == "":
        return None
    v = float(text)
    if v != v or v in (float("inf"), float("-inf")) or v != int(v):
        raise ValueError(text)
    if not allow_negative and v < 0:
        raise ValueError(text)
    return int(v)


def parse_date(text):
    text = text.strip().split(" ")[0]
    if "-" in text:
        y, m, d = text.split("-")
    else:
        m, d, y = text.split("/")
    return dt.date(int(y), int(m), int(d))


def tabulate(path):
    total = on_time = delayed = cancelled_count = 0
    cause_total = dict.fromkeys(CAUSES, 0)
    by_state, by_carrier = {}, {}
    by_weekday = {d: {"flights": 0, "delayed": 0} for d in WEEKDAYS}
    tree = {}

    with open(path, newline="", encoding="utf-8-sig") as f:
        for row in csv.DictReader(f):
            try:
                date = parse_date(row["FL_DATE"])
                state = row["ORIGIN_STATE_ABR"].strip()
                if len(state) != 2 or not state.isalpha() or not state.isupper():
                    raise ValueError(state)
                canc = minutes(row["CANCELLED"])
                if canc not in (0, 1):
                    raise ValueError("cancelled")
                dep = minutes(row["DEP_DELAY"])
                cause = [minutes(row[c], allow_negative=False) or 0 for c in CAUSE_COLUMNS]
                carrier = row["OP_CARRIER"].strip()
                fl_num = row["OP_CARRIER_FL_NUM"].strip()
                if not carrier or not fl_num or not row["ORIGIN"].strip() or not row["DEST"].strip():
                    raise ValueError("identity")
            except (ValueError, KeyError):
                continue

            total += 1
            if canc == 1:
                cancelled_count += 1
                continue
            is_delayed = dep is not None and dep >= 15
            if is_delayed:
                delayed += 1
            else:
                on_time += 1
            for name, m in zip(CAUSES, cause):
                cause_total[name] += m
            for table, key in ((by_state, state), (by_carrier, carrier)):
                e = table.setdefault(key, {"flights": 0, "delayed": 0, "cause_minutes": dict.fromkeys(CAUSES, 0)})
                e["flights"] += 1
                e["delayed"] += int(is_delayed)
                for name, m in zip(CAUSES, cause):
                    e["cause_minutes"][name] += m
            wd = by_weekday[WEEKDAYS[date.weekday()]]
            wd["flights"] += 1
            wd["delayed"] += int(is_delayed)
            if sum(cause) > 0:
                flights = tree.setdefault(carrier, {})
                flights[carrier + fl_num] = flights.get(carrier + fl_num, 0) + sum(cause)

    base = on_time + delayed
    if base:
        # Hundredths of a percent, round half up, computed in integers.
        on_h = (on_time * 20000 + base) // (2 * base)
        del_h = 10000 - on_h
    else:
        on_h = del_h = 0

    def order(nodes):
        return sorted(nodes, key=lambda n: (-n["weight"], n["name"]))

    treemap = []
    for carrier, flights in tree.items():
        children = order([{"name": k, "weight": v} for k, v in flights.items()])
        treemap.append({"name": carrier, "weight": sum(flights.values()), "children": children})

    return {
        "total_flights": total,
        "on_time_count": on_time,
        "delayed_count": delayed,
        "cancelled_count": cancelled_count,
        "on_time_pct": on_h / 100.0,
        "delayed_pct": del_h / 100.0,
        "cause_minutes": cause_total,
        "headline_cause_minutes": {k: cause_total[k] for k in ("weather", "nas", "security")},
        "by_state": by_state,
        "by_carrier": by_carrier,
        "by_weekday": by_weekday,
        "treemap": order(treemap),
    }


def main():
    p = argparse.ArgumentParser()
    sub = p.add_subparsers(dest="cmd", required=True)
    g = sub.add_parser("generate")
    g.add_argument("out")
    g.add_argument("--rows", type=int, default=10_000)
    g.add_argument("--seed", type=int, default=2023)
    t = sub.add_parser("tabulate")
    t.add_argument("csv")
    t.add_argument("out")
    args = p.parse_args()
    if args.cmd == "generate":
        generate(args.out, args.rows, args.seed)
    else:
        with open(args.out, "w") as f:
            f.write(json.dumps(tabulate(args.csv), indent=2, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

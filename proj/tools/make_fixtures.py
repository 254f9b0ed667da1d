#!/usr/bin/env python3
"""Regenerates the synthetic test fixtures under tests/fixtures.

    python3 tools/make_fixtures.py [--out tests/fixtures]

Writes
  corpus/         20 paper records, manifest.csv and offline provider data
  demo_providers/ a minimal provider fixture set for client tests
  selfcite.jsonl  37 author/reference lists with hand-assigned true ratios

Output is deterministic. Names, titles and numbers are invented.
"""

import argparse
import json
import random
import re
import shutil
import unicodedata
from pathlib import Path

NOW_YEAR = 2021


def normalize_text(s):
    s = unicodedata.normalize("NFKD", s)
    s = "".join(c for c in s if ord(c) < 128)
    s = s.lower().replace("'", "")
    s = re.sub(r"[^a-z0-9]+", " ", s)
    return " ".join(s.split())


def fixture_key(doi_or_title):
    low = doi_or_title.lower()
    for prefix in ("https://doi.org/", "http://doi.org/", "https://dx.doi.org/",
                   "http://dx.doi.org/", "doi:"):
        if low.startswith(prefix):
            low = low[len(prefix):]
            break
    base = low if low.startswith("10.") else "title_" + normalize_text(doi_or_title)
    return re.sub(r"[^a-z0-9._-]", "_", base)[:160]


def author_key(last, first):
    key = normalize_text(last).replace(" ", "_")
    ini = next((c for c in normalize_text(first) if c.isalpha()), "")
    return key + ("_" + ini if ini else "")


def dump(path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, ensure_ascii=False, sort_keys=True) + "\n",
                    encoding="utf-8")


AUTHORS = [
    ("Okafor", "Chidi"), ("Lindqvist", "Maja"), ("Moreau", "Julien"),
    ("Tanaka", "Haruto"), ("Brennan", "Siobhan"), ("Kowalski", "Piotr"),
    ("Alvarez", "Lucia"), ("Haddad", "Rami"), ("Novak", "Eva"),
    ("Fischer", "Jonas"), ("Sato", "Yui"), ("Osei", "Kwame"),
    ("Rossi", "Giulia"), ("Petrov", "Ivan"), ("Kim", "Minji"),
    ("Dubois", "Camille"), ("Nguyen", "Linh"), ("Schmidt", "Anna"),
    ("Costa", "Rafael"), ("Jensen", "Freja"), ("Walsh", "Declan"),
    ("Mehta", "Priya"), ("Ibrahim", "Amina"), ("Larsen", "Nils"),
    ("Garcia", "Mateo"), ("Yilmaz", "Elif"), ("Murphy", "Aoife"),
    ("Weber", "Lena"),
]

AFFILIATIONS = [
    "Department of Psychology, University of Oxford, Oxford, UK",
    "Stanford University",
    "Dept. of Economics, MIT, Cambridge, MA",
    "Harvard University, Cambridge, MA, USA",
    "School of Psychology, UCL, London",
    "University of Toronto",
    "ETH Zurich, Switzerland",
    "University of Amsterdam, Netherlands",
    "Department of Psychology, University of Michigan, Ann Arbor",
    "Yale University, New Haven, CT",
    "UC Berkeley",
    "University of Edinburgh",
    "Karolinska Institute",
    "Institute for Applied Studies, Riverbend College",
    "Northfield Polytechnic Institute",
]

VENUES = {
    "0956-7976": {"cite_score": 10.4, "snip": 2.31, "scholarly_output": 612,
                  "percent_cited": 81.0, "citation_count": 6365, "sjr": 3.86,
                  "asjc_code": 3200},
    "0022-3514": {"cite_score": 11.9, "snip": 2.74, "scholarly_output": 498,
                  "percent_cited": 88.0, "citation_count": 5926, "sjr": 4.27,
                  "asjc_code": 3207},
    "0096-3445": {"cite_score": 7.1, "snip": 1.92, "scholarly_output": 540,
                  "percent_cited": 84.0, "citation_count": 3834, "sjr": 2.95,
                  "asjc_code": 3205},
    "0002-8282": {"cite_score": 9.2, "snip": 3.88, "scholarly_output": 711,
                  "percent_cited": 70.0, "citation_count": 6541, "sjr": 11.2,
                  "asjc_code": 2000},
    "0010-0277": {"cite_score": 6.3, "snip": 1.64, "scholarly_output": 802,
                  "percent_cited": 79.0, "citation_count": 5052, "sjr": 2.41,
                  "subject_name": "Experimental and Cognitive Psychology"},
}

TITLE_WORDS = [
    "priming", "attention", "choice", "memory", "trust", "reward", "fairness",
    "framing", "anchoring", "cooperation", "moral judgment", "self control",
    "risk", "perception", "learning", "motivation", "loss aversion", "empathy",
    "time pressure", "social norms",
]

STAT_SENTENCES_N = [
    "Participants were faster after training, t({df}) = {v:.2f}, p = {p}.",
    "A sample of N = {n} adults completed the survey.",
    "The manipulation check succeeded, t({df}) = {v:.2f}, p < {p}.",
    "Choice shares differed, χ2(1, N = {n}) = {v:.2f}, p = {p}.",
]
STAT_SENTENCES_NO_N = [
    "The main effect was reliable, F(1, {df}) = {v:.2f}, p = {p}.",
    "Ratings correlated with confidence, r({df}) = .{r}, p = {p}.",
    "The sign test gave z = {v:.2f}, p = {p}.",
    "All remaining comparisons gave p > {p}.",
]


def pick(rng, n, k):
    return set(rng.sample(range(n), k))


def fmt_p(p):
    s = f"{p:.3f}".rstrip("0")
    return s[1:] if s.startswith("0.") else s


def make_corpus(out, rng):
    n = 20
    root = out / "corpus"
    if root.exists():
        shutil.rmtree(root)
    prov = root / "providers"

    labels = [True] * 10 + [False] * 8 + [None, None]
    rng.shuffle(labels)
    years = [rng.randint(2008, 2016) for _ in range(n)]
    no_doi = {6, 14}

    # Availability of each data source, chosen so that sample_size,
    # influentialReferencesCount and funded fall below 15 real values.
    has_stats = pick(rng, n, 17)
    has_n = set(sorted(has_stats)[:12])
    has_infl_refs = pick(rng, n, 10)
    has_ack = pick(rng, n, 13)
    has_venue = pick(rng, n, 18)
    has_s2 = set(range(n)) - {11}
    has_open = pick(rng, n, 17)
    has_intents = pick(rng, n - 1, 17)
    has_upstream = pick(rng, n, 16)
    unranked = pick(rng, n, 3)
    has_scopus = pick(rng, n, 16)

    issns = sorted(VENUES)
    author_files = set(rng.sample(range(len(AUTHORS)), 23))

    records, manifest, graph = [], [], {}

    for i in range(n):
        pid = f"p{i + 1:02d}"
        y0 = years[i]
        lab = labels[i]
        good = lab is True
        title = (f"Effects of {TITLE_WORDS[i]} on "
                 f"{TITLE_WORDS[(i * 7 + 3) % len(TITLE_WORDS)]} in study {i + 1}")
        doi = None if i in no_doi else f"10.5555/fx.{y0}.{i + 1:03d}"
        authors = [AUTHORS[j] for j in rng.sample(range(len(AUTHORS)),
                                                  rng.randint(1, 4))]
        if i in unranked:
            affs = ["Institute for Applied Studies, Riverbend College"] if i % 2 else []
        else:
            affs = [AFFILIATIONS[rng.randrange(13)] for _ in authors]

        refs = []
        for _ in range(rng.randint(6, 14)):
            if rng.random() < 0.2:
                ra = [{"last": a[0], "first": a[1][0] + "."} for a in authors[:1]]
            else:
                ra = [{"last": AUTHORS[j][0], "first": AUTHORS[j][1]}
                      for j in rng.sample(range(len(AUTHORS)), 2)]
            refs.append({"title": f"Prior work on {rng.choice(TITLE_WORDS)}",
                         "authors": ra, "year": y0 - rng.randint(1, 15)})

        body = [f"We studied {TITLE_WORDS[i]} in a preregistered design."]
        if i in has_stats:
            p_main = rng.choice([0.001, 0.004, 0.01, 0.02]) if good else \
                rng.choice([0.03, 0.04, 0.049, 0.12])
            templates = STAT_SENTENCES_N if i in has_n else STAT_SENTENCES_NO_N
            for t in rng.sample(templates, 2):
                body.append(t.format(df=rng.randint(20, 180), v=rng.uniform(1.5, 6),
                                     p=fmt_p(p_main), n=rng.randint(40, 400),
                                     r=rng.randint(20, 60)))
                p_main = min(0.9, p_main * rng.choice([1, 2, 3]))
        body.append("Results are discussed in relation to prior work.")

        rec = {"id": pid, "title": title, "pub_year": y0,
               "authors": [{"last": a[0], "first": a[1]} for a in authors],
               "affiliations": affs, "references": refs,
               "body_text": " ".join(body)}
        if doi:
            rec["doi"] = doi
        if i in has_venue:
            rec["venue_issn"] = issns[i % len(issns)]
        if i in has_ack:
            rec["ack_text"] = ("This work was supported by grant 1234 from the "
                               "National Science Foundation." if i % 3 else
                               "We thank the participants and research assistants.")
        records.append(rec)
        manifest.append(f"{pid}.json,{'unknown' if lab is None else int(lab)}")

        # Provider sections.
        age = NOW_YEAR - y0
        base = rng.randint(30, 90) if good else rng.randint(5, 60)
        per_year = {str(y0 + k): max(0, int(base / 6 * (1 + k) + rng.randint(-3, 3)))
                    for k in range(age + 1)}
        total = sum(per_year.values())
        gid = f"G{pid}"
        s2 = {"title": title if i != 3 else title.upper(), "pub_year": y0,
              "graph_id": gid, "citation_velocity": round(total / max(age, 1) * 0.8, 1),
              "per_year_citations": per_year,
              "influential_citation_count": rng.randint(0, total // 8 + 1),
              "references_count": len(refs)}
        if i in has_infl_refs:
            s2["influential_references_count"] = rng.randint(0, 6)
        if i in has_intents:
            s2["intents_in"] = {
                "background": rng.randint(5, 40),
                "methodology": rng.randint(6, 14) if good else rng.randint(0, 7),
                "result": rng.randint(0, 8)}
            s2["intents_out"] = {"background": rng.randint(4, 20),
                                 "methodology": rng.randint(0, 8),
                                 "result": rng.randint(0, 5)}
        if i in has_upstream:
            s2["upstream_influential_methodology_count"] = rng.randint(0, 5)
        crossref = {"title": title, "pub_year": y0,
                    "citations_crossref": total - rng.randint(0, 5),
                    "references_count": len(refs) + rng.randint(0, 2)}
        if i == 19:
            crossref["title"] = "An unrelated article about soil chemistry"
        scopus = None
        if i in has_scopus:
            scopus = {"title": title, "pub_year": y0,
                      "citations_scopus": total + rng.randint(0, 6)}
            if i in has_open:
                scopus["open_access"] = rng.random() < 0.5
        elif i in has_open:
            crossref["open_access"] = rng.random() < 0.5
        sections = {"s2": s2 if i in has_s2 else None, "crossref": crossref,
                    "scopus": scopus}
        dump(prov / "papers" / (fixture_key(doi or title) + ".json"), sections)

        graph[gid] = {"year": y0, "references": []}

    # Citation graph: corpus papers cite older corpus papers; external papers
    # cite a few corpus and external papers each.
    ids = sorted(graph)
    for gid in ids:
        older = [g for g in ids if graph[g]["year"] < graph[gid]["year"]]
        graph[gid]["references"] = sorted(rng.sample(older, min(len(older), 3)))
    for k in range(80):
        ext = f"X{k:03d}"
        year = rng.randint(2008, 2020)
        pool = [g for g in sorted(graph) if (graph[g]["year"] or 0) < year]
        graph[ext] = {"year": year,
                      "references": sorted(rng.sample(pool, min(len(pool), rng.randint(2, 4))))}
    dump(prov / "graph.json", {"nodes": graph})

    for issn, metrics in VENUES.items():
        dump(prov / "venues" / (fixture_key(issn) + ".json"), metrics)
    for j in sorted(author_files):
        last, first = AUTHORS[j]
        pubs = rng.randint(10, 200)
        dump(prov / "authors" / (author_key(last, first) + ".json"),
             {"pub_count": pubs, "h_index": rng.randint(3, 45),
              "highly_influential_cites": rng.randint(0, 300),
              "total_cites": pubs * rng.randint(10, 60)})

    for rec in records:
        dump(root / f"{rec['id']}.json", rec)
    (root / "manifest.csv").write_text(
        "# relative path, label (1 reproducible, 0 not, unknown)\n" +
        "\n".join(manifest) + "\n", encoding="utf-8")


# Self-citation fixture: every reference is labeled by hand as a self-citation
# or not; name variants are spread over the records so the matcher has to
# tolerate initials, accents and typos, and a few cases defeat it on purpose.
def make_selfcite(out, rng):
    variants = {
        "initial": lambda a: {"last": a[0], "first": a[1][0] + "."},
        "exact": lambda a: {"last": a[0], "first": a[1]},
        "upper": lambda a: {"last": a[0].upper(), "first": a[1]},
    }
    accents = {"Muller": "Müller", "Bjork": "Björk", "Nunez": "Núñez",
               "Sorensen": "Sørensen", "Lopez": "López"}
    pool = AUTHORS + [(k, f) for k, f in zip(accents, ["Hanna", "Leif", "Marta", "Karl", "Ines"])]

    lines = []
    for r in range(37):
        team = rng.sample(pool, rng.randint(1, 4))
        refs, truth = [], 0
        nref = rng.randint(5, 20)
        for _ in range(nref):
            if rng.random() < 0.3:
                who = rng.choice(team)
                kind = rng.choice(sorted(variants))
                a = variants[kind](who)
                if who[0] in accents and rng.random() < 0.5:
                    a["last"] = accents[who[0]]
                elif len(who[0]) >= 7 and rng.random() < 0.3:
                    a["last"] = who[0][:-2] + who[0][-1] + who[0][-2]  # transposition
                coauthor = rng.choice([x for x in pool if x not in team])
                refs.append({"authors": [{"last": coauthor[0], "first": coauthor[1]}, a],
                             "year": 2000 + rng.randint(0, 15)})
                truth += 1
            else:
                others = rng.sample([x for x in pool if x not in team], 2)
                refs.append({"authors": [{"last": o[0], "first": o[1]} for o in others],
                             "year": 2000 + rng.randint(0, 15)})
        if r % 9 == 4:
            # A co-author who later changed name: the matcher cannot see it.
            who = team[0]
            refs.append({"authors": [{"last": who[0] + "-Whitfield", "first": who[1]}],
                         "year": 2012})
            truth += 1
        if r % 9 == 7:
            # A different person sharing surname and initial.
            who = team[0]
            refs.append({"authors": [{"last": who[0], "first": who[1][0] + "."}],
                         "year": 2010})
        lines.append({"id": f"s{r + 1:02d}",
                      "authors": [{"last": a[0], "first": a[1]} for a in team],
                      "references": refs,
                      "true_ratio": truth / len(refs)})
    with open(out / "selfcite.jsonl", "w", encoding="utf-8") as f:
        for line in lines:
            f.write(json.dumps(line, ensure_ascii=False, sort_keys=True) + "\n")


def make_demo_providers(out):
    root = out / "demo_providers"
    if root.exists():
        shutil.rmtree(root)
    dump(root / "papers" / (fixture_key("10.x/demo1") + ".json"), {
        "s2": {"title": "A demonstration record", "pub_year": 2018,
               "citation_velocity": 3, "influential_citation_count": 2,
               "references_count": 30,
               "intents_in": {"background": 5, "methodology": 2, "result": 1}},
        "crossref": {"title": "A demonstration record", "pub_year": 2018,
                     "citations_crossref": 10, "references_count": 32},
        "scopus": {"title": "A Demonstration Record", "citations_scopus": 12,
                   "open_access": True},
    })
    dump(root / "venues" / (fixture_key("1234-5678") + ".json"),
         {"sjr": 1.4, "cite_score": 3.2, "snip": 1.1, "asjc_code": 3200})
    dump(root / "authors" / (author_key("Doe", "Jane") + ".json"),
         {"h_index": 10, "pub_count": 40})
    dump(root / "authors" / (author_key("Roe", "Richard") + ".json"),
         {"h_index": 20, "pub_count": 90})


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parent.parent / "tests" / "fixtures")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    make_corpus(args.out, random.Random(20210))
    make_demo_providers(args.out)
    make_selfcite(args.out, random.Random(37))


if __name__ == "__main__":
    main()

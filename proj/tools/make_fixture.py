#!/usr/bin/env python3
"""Generate the bundled 200-model snapshot used by tests and examples.

The output is deterministic: re-running it reproduces data/fixture_200.csv
byte for byte. Names imitate common hub naming habits (family, size suffix,
fine-tune tags, quantisation markers) so the clustering has real structure.
"""

import argparse
import math
import random
import re

FAMILIES = [
    ("meta-llama", "llama"), ("lmsys", "vicuna"), ("EleutherAI", "pythia"),
    ("tiiuae", "falcon"), ("bigscience", "bloom"), ("mosaicml", "mpt"),
    ("facebook", "opt"), ("Salesforce", "codegen"), ("WizardLM", "wizardlm"),
    ("togethercomputer", "redpajama-incite"), ("databricks", "dolly-v2"),
    ("EleutherAI", "gpt-neo"), ("EleutherAI", "gpt-j"), ("stabilityai", "stablelm"),
    ("timdettmers", "guanaco"), ("jondurbin", "airoboros"), ("bigcode", "starcoder"),
    ("huggyllama", "alpaca"), ("microsoft", "dialogpt"), ("cerebras", "cerebras-gpt"),
]
SIZES = ["70m", "125m", "160m", "350m", "560m", "1b", "1.3b", "3b", "6b", "7b", "12b", "13b", "30b", "65b"]
TAGS = ["instruct", "chat", "base", "deduped", "sft", "v1", "v2", "hf", "superhot-8k", "uncensored",
        "lora", "merged", "fp16", "4bit-128g", "gptq", "ggml", "finetuned-wikitext2"]
SOLO = ["gpt2", "distilgpt2", "gpt2-medium", "gpt2-large", "gpt2-xl", "tiny-gpt2", "codeparrot",
        "codeparrot-small", "santacoder", "t5-small-lm", "rarity-all-ds", "my_awesome_eli5_clm-model",
        "gpt2-finetuned-imdb", "elonmusk-gpt2", "chinese-alpaca-plus", "open-llama-7b-open-instruct"]
USERS = ["TheBloke", "ybelkada", "lvwerra", "huggingtweets", "sshleifer", "hf-internal-testing",
         "openaccess-ai-collective", "ehartford", "young-geng", "anon8231489123", "mrm8488", "Writer"]

PARAM = re.compile(r"(\d+(\.\d+)?)(B|M|b|m)")


def params_millions(name):
    m = PARAM.search(name)
    if not m:
        return None
    v = float(m.group(1)) * (1000.0 if m.group(3) in "Bb" else 1.0)
    return v if v > 0 else None


def fmt_real(v):
    r = repr(float(v))
    return r if "." in r or "e" in r else r + ".0"


def make_names(rng, count):
    ids = []
    seen = set()
    for name in SOLO:
        org = rng.choice(USERS) if "-" in name and rng.random() < 0.4 else None
        ids.append(f"{org}/{name}" if org else name)
        seen.add(ids[-1])
    while len(ids) < count:
        org, family = rng.choice(FAMILIES)
        parts = [family, rng.choice(SIZES)]
        for _ in range(rng.choice([0, 1, 1, 2])):
            parts.append(rng.choice(TAGS))
        if rng.random() < 0.35:
            org = rng.choice(USERS)
        ident = f"{org}/{'-'.join(parts)}"
        if ident not in seen:
            seen.add(ident)
            ids.append(ident)
    return ids


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=20230718)
    ap.add_argument("--out", default="data/fixture_200.csv")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    rows = []
    for ident in make_names(rng, args.count):
        downloads = int(10 ** rng.uniform(1.7, 7.2))
        likes = int(downloads ** 0.55 * rng.uniform(0.02, 0.9))
        if rng.random() < 0.03:
            downloads = None
        if rng.random() < 0.04:
            likes = None
        rows.append((ident, downloads, likes))

    rows.sort(key=lambda r: (r[1] is None, -(r[1] or 0)))
    with open(args.out, "w", newline="") as f:
        f.write("rank,model_name,link,downloads,likes,ReadMeLink,params_millions\n")
        for rank, (ident, downloads, likes) in enumerate(rows, start=1):
            name = ident.rsplit("/", 1)[-1]
            link = f"https://huggingface.co/{ident}"
            p = params_millions(name)
            fields = [
                str(rank), name, link,
                "NaN" if downloads is None else f"{downloads}.0",
                "NaN" if likes is None else f"{likes}.0",
                link + "/raw/main/README.md",
                "NaN" if p is None else fmt_real(p),
            ]
            f.write(",".join(fields) + "\n")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Convert upstream network archives into topology-only bcflow documents.

Supported inputs:
  * GasLib network files (`*.net`, XML), or a GasLib `.zip` holding one.
  * MATPOWER case files (`*.m`), e.g. the synthetic Texas grid.

Every node becomes a junction and every connection or branch becomes a pipe
with alpha 1. Only the topology matters for block statistics. The first
source (GasLib) or the reference bus (MATPOWER) is marked as the slack.

Usage:
  scripts/gaslib_to_json.py GasLib-40.zip -o crates/cli/tests/fixtures/benchmarks/gaslib-40.json
  scripts/gaslib_to_json.py ACTIVSg2000.m --name texas-2451 -o texas-2451.json
"""

import argparse
import json
import re
import sys
import xml.etree.ElementTree as ET
import zipfile
from pathlib import Path

GAS_NODE_TAGS = {"source", "sink", "innode"}
GAS_EDGE_TAGS = {
    "pipe",
    "shortPipe",
    "resistor",
    "valve",
    "controlValve",
    "compressorStation",
}


def local(tag):
    return tag.rsplit("}", 1)[-1]


def read_gaslib(text):
    root = ET.fromstring(text)
    nodes, edges = [], []
    for el in root.iter():
        tag = local(el.tag)
        if tag in GAS_NODE_TAGS:
            nodes.append((el.attrib["id"], tag == "source"))
        elif tag in GAS_EDGE_TAGS:
            edges.append((el.attrib["id"], el.attrib["from"], el.attrib["to"]))
    return nodes, edges


def matpower_matrix(text, field):
    m = re.search(r"mpc\." + field + r"\s*=\s*\[(.*?)\];", text, re.S)
    if m is None:
        sys.exit(f"no mpc.{field} matrix found")
    rows = []
    for line in m.group(1).splitlines():
        line = line.split("%", 1)[0].strip().rstrip(";").strip()
        if line:
            rows.append(line.split())
    return rows


def read_matpower(text):
    buses = matpower_matrix(text, "bus")
    nodes = [(f"b{row[0]}", row[1] == "3") for row in buses]
    edges = []
    for k, row in enumerate(matpower_matrix(text, "branch")):
        # column 11 is the in-service status
        if len(row) > 10 and float(row[10]) == 0:
            continue
        edges.append((f"l{k}", f"b{row[0]}", f"b{row[1]}"))
    return nodes, edges


def load(path):
    if path.suffix == ".zip":
        with zipfile.ZipFile(path) as z:
            nets = [n for n in z.namelist() if n.endswith(".net")]
            if len(nets) != 1:
                sys.exit(f"{path}: expected one .net member, found {nets}")
            return read_gaslib(z.read(nets[0]))
    text = path.read_text()
    if path.suffix == ".m":
        return read_matpower(text)
    return read_gaslib(text)


def to_document(name, nodes, edges):
    if not nodes:
        sys.exit("no nodes found")
    slack = next((i for i, (_, s) in enumerate(nodes) if s), 0)
    ids = {n for n, _ in nodes}
    doc_nodes = []
    for i, (n, _) in enumerate(nodes):
        if i == slack:
            doc_nodes.append({"id": n, "slack": True, "potential": 1.0})
        else:
            doc_nodes.append({"id": n, "slack": False, "injection": 0.0})
    doc_edges = []
    for e, a, b in edges:
        if a not in ids or b not in ids:
            sys.exit(f"connection {e} refers to an unknown node")
        if a == b:
            print(f"skipping self-loop {e}", file=sys.stderr)
            continue
        doc_edges.append({"id": e, "from": a, "to": b, "kind": "pipe", "alpha": 1.0})
    return {"version": "1", "name": name, "nodes": doc_nodes, "edges": doc_edges}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("input", type=Path)
    ap.add_argument("-o", "--output", type=Path)
    ap.add_argument("--name", help="document name (default: input file stem)")
    args = ap.parse_args()
    nodes, edges = load(args.input)
    doc = to_document(args.name or args.input.stem, nodes, edges)
    text = json.dumps(doc, indent=2) + "\n"
    if args.output:
        args.output.write_text(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()

"""Writes the synthetic OSM extracts town_{a,b,c}.osm and their POI lists.

Each town is a jittered street grid. Streets are split into ways spanning a
few blocks with curved shape nodes, tagged with a mix of highway classes,
some one-way (forward or reversed), a roundabout-like loop, amenity nodes
that no way uses and one way pointing at a node that does not exist.

    python3 gen_towns.py
"""

import random

TOWNS = [
    ("town_a", 11, 18, 14, 6),
    ("town_b", 23, 16, 20, 5),
    ("town_c", 37, 20, 15, 7),
]
ORIGIN = (-22.03, -47.91)
SPACING = 0.0011
CLASSES = ["residential"] * 6 + ["tertiary", "secondary", "unclassified", "service", "footway"]


def town(name, seed, rows, cols, n_pois):
    rng = random.Random(seed)
    next_id = [1000]

    def new_id():
        next_id[0] += 1
        return next_id[0]

    nodes = []  # (id, lat, lon, tags)
    grid = {}
    for r in range(rows):
        for c in range(cols):
            lat = ORIGIN[0] + r * SPACING + rng.uniform(-0.2, 0.2) * SPACING
            lon = ORIGIN[1] + c * SPACING + rng.uniform(-0.2, 0.2) * SPACING
            nid = new_id()
            grid[(r, c)] = nid
            nodes.append((nid, lat, lon, {}))
    coords = {n[0]: (n[1], n[2]) for n in nodes}

    def shape_between(a, b):
        (la, oa), (lb, ob) = coords[a], coords[b]
        out = []
        for t in (1 / 3, 2 / 3):
            bend = rng.uniform(-0.08, 0.08) * SPACING
            lat = la + (lb - la) * t + bend
            lon = oa + (ob - oa) * t - bend
            nid = new_id()
            coords[nid] = (lat, lon)
            nodes.append((nid, lat, lon, {}))
            out.append(nid)
        return out

    ways = []

    def add_street(cells, tags):
        refs = [grid[cells[0]]]
        for a, b in zip(cells, cells[1:]):
            if rng.random() < 0.5:
                refs.extend(shape_between(grid[a], grid[b]))
            refs.append(grid[b])
        ways.append((refs, tags))

    def lines(fixed_count, run_count, make):
        for fixed in range(fixed_count):
            start = 0
            while start < run_count - 1:
                length = rng.randint(2, 5)
                end = min(run_count - 1, start + length)
                if rng.random() >= 0.04:
                    cells = [make(fixed, k) for k in range(start, end + 1)]
                    main = fixed % 6 == 0
                    tags = {"highway": "primary" if main else rng.choice(CLASSES)}
                    roll = rng.random()
                    if not main and roll < 0.18:
                        tags["oneway"] = "yes"
                    elif not main and roll < 0.26:
                        tags["oneway"] = "-1"
                    elif not main and roll < 0.30:
                        tags["oneway"] = "no"
                    add_street(cells, tags)
                start = end

    lines(rows, cols, lambda r, c: (r, c))
    lines(cols, rows, lambda c, r: (r, c))

    # roundabout around the middle intersection
    mr, mc = rows // 2, cols // 2
    ring = [(mr, mc), (mr, mc + 1), (mr + 1, mc + 1), (mr + 1, mc), (mr, mc)]
    ways.append(([grid[x] for x in ring], {"highway": "tertiary", "junction": "roundabout", "oneway": "yes"}))

    for k in range(3):
        nid = new_id()
        lat, lon = coords[grid[(rng.randrange(rows), rng.randrange(cols))]]
        nodes.append((nid, lat + 0.0001, lon + 0.0001, {"amenity": "school", "name": f"Escola {k} & Cia"}))
    ways.append(([grid[(0, 0)], 999_999], {"highway": "residential", "name": "broken"}))

    with open(f"{name}.osm", "w", encoding="utf-8") as f:
        f.write('<?xml version="1.0" encoding="UTF-8"?>\n')
        f.write(f'<osm version="0.6" generator="gen_towns.py seed={seed}">\n')
        for nid, lat, lon, tags in nodes:
            if tags:
                f.write(f'  <node id="{nid}" lat="{lat:.7f}" lon="{lon:.7f}">\n')
                for k, v in tags.items():
                    v = v.replace("&", "&amp;")
                    f.write(f'    <tag k="{k}" v="{v}"/>\n')
                f.write("  </node>\n")
            else:
                f.write(f'  <node id="{nid}" lat="{lat:.7f}" lon="{lon:.7f}"/>\n')
        for i, (refs, tags) in enumerate(ways):
            f.write(f'  <way id="{5000 + i}">\n')
            for r in refs:
                f.write(f'    <nd ref="{r}"/>\n')
            for k, v in tags.items():
                f.write(f'    <tag k="{k}" v="{v}"/>\n')
            f.write("  </way>\n")
        f.write("</osm>\n")

    with open(f"{name}.pois", "w", encoding="utf-8") as f:
        f.write(f"# hospitals of {name}\n")
        cells = rng.sample(sorted(grid), n_pois)
        for k, cell in enumerate(cells):
            lat, lon = coords[grid[cell]]
            f.write(f"{lat + 0.00005:.7f} {lon - 0.00005:.7f} h{k + 1:02d}\n")


if __name__ == "__main__":
    for args in TOWNS:
        town(*args)

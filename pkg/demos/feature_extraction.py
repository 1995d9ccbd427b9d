"""Walk one synthetic word through the structural feature extractor.

Builds a word from known primitives, renders it as ASCII art, and shows
how each primitive is recovered: poles (H), jambs (J), upper and lower
diacritic dots (P, Q), and loops (B), each tagged with its word part and
letter position.
"""

from scriptid import GlyphSpec, bar, body, dot, extract_features, generate, ring, tail

# A single word part carrying every primitive once.
spec = GlyphSpec((body(), bar(), tail(), dot("upper"), dot("lower"), ring()))
word = generate(spec)

print("expected counts:", word.expected.counts, "parts:", word.expected.nb_paws)
print("band rows:", word.band.upper_row, "to", word.band.lower_row)
print()

# Render the bitmap; baseline rows are marked at the right edge.
for r in range(word.raster.height):
    row = "".join("#" if word.raster.pixels[r, c] else "." for c in range(word.raster.width))
    marker = " <- baseline" if r in (word.band.upper_row, word.band.lower_row) else ""
    print(row + marker)
print()

fs = extract_features(word.raster, word.band)
print("extracted counts:", fs.counts, "parts:", fs.nb_paws)
for hit in fs.hits:
    print(
        f"  {hit.kind} at row {hit.location[0]:3d} col {hit.location[1]:3d}"
        f"  part {hit.paw_index}  position {hit.position}"
    )

assert fs.counts == word.expected.counts, "extraction must match construction"
print("\nextraction matches the construction exactly")

#!/usr/bin/env python3
"""Regenerates src/unicode_tables.cpp from Python's unicodedata.

Letter ranges cover every codepoint with general category L*.  The fold
table maps codepoints whose single-codepoint lowercase form differs from
the codepoint itself (multi-codepoint lowerings are left unfolded, which
matches simple one-to-one case folding).  ASCII is excluded from both
tables; the tokenizer handles it inline.
"""
import sys
import unicodedata

def main(out_path: str) -> None:
    letters = []
    folds = []
    for cp in range(0x80, 0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        ch = chr(cp)
        if unicodedata.category(ch).startswith("L"):
            letters.append(cp)
            low = ch.lower()
            if len(low) == 1 and low != ch:
                folds.append((cp, ord(low)))

    ranges = []
    for cp in letters:
        if ranges and ranges[-1][1] + 1 == cp:
            ranges[-1][1] = cp
        else:
            ranges.append([cp, cp])

    with open(out_path, "w") as f:
        f.write("// Generated by tools/gen_unicode_tables.py (unicodedata %s)."
                " Do not edit.\n" % unicodedata.unidata_version)
        f.write("#include \"markerscan/unicode.hpp\"\n\n")
        f.write("namespace markerscan::detail {\n\n")
        f.write("const CodepointRange kLetterRanges[] = {\n")
        for i in range(0, len(ranges), 6):
            row = ", ".join("{0x%X, 0x%X}" % (lo, hi) for lo, hi in ranges[i:i + 6])
            f.write("    %s,\n" % row)
        f.write("};\n")
        f.write("const std::size_t kLetterRangeCount = %d;\n\n" % len(ranges))
        f.write("const FoldPair kFoldPairs[] = {\n")
        for i in range(0, len(folds), 6):
            row = ", ".join("{0x%X, 0x%X}" % (a, b) for a, b in folds[i:i + 6])
            f.write("    %s,\n" % row)
        f.write("};\n")
        f.write("const std::size_t kFoldPairCount = %d;\n\n" % len(folds))
        f.write("}  // namespace markerscan::detail\n")
    print("wrote %s: %d letter ranges, %d fold pairs" %
          (out_path, len(ranges), len(folds)))

if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/unicode_tables.cpp")

#!/usr/bin/env python3
"""Regenerates core/src/unicode_tables.inc from Python's unicodedata."""
import sys
import unicodedata

MAX = 0x110000


def ranges(pred):
    out, start = [], None
    for cp in range(MAX):
        hit = pred(cp)
        if hit and start is None:
            start = cp
        elif not hit and start is not None:
            out.append((start, cp - 1))
            start = None
    if start is not None:
        out.append((start, MAX - 1))
    return out


def is_punct(cp):
    if cp < 0x80 and not chr(cp).isalnum() and 0x21 <= cp <= 0x7E:
        return True  # ASCII punctuation and symbols
    return unicodedata.category(chr(cp)).startswith("P")


def is_space(cp):
    return chr(cp).isspace()


def lower_pairs():
    out = []
    for cp in range(MAX):
        c = chr(cp)
        low = c.lower()
        if len(low) == 1 and low != c:
            out.append((cp, ord(low)))
    return out


def emit(fh):
    fh.write("// Generated by scripts/gen_unicode_tables.py (Unicode %s). Do not edit.\n\n"
             % unicodedata.unidata_version)
    fh.write("struct CodepointRange { char32_t lo; char32_t hi; };\n")
    fh.write("struct CaseMapping { char32_t from; char32_t to; };\n\n")
    for name, rs in (("kPunctuationRanges", ranges(is_punct)),
                     ("kWhitespaceRanges", ranges(is_space))):
        fh.write("inline constexpr CodepointRange %s[] = {\n" % name)
        for lo, hi in rs:
            fh.write("    {0x%04X, 0x%04X},\n" % (lo, hi))
        fh.write("};\n\n")
    fh.write("inline constexpr CaseMapping kLowercaseMap[] = {\n")
    for a, b in lower_pairs():
        fh.write("    {0x%04X, 0x%04X},\n" % (a, b))
    fh.write("};\n")


if __name__ == "__main__":
    emit(sys.stdout)

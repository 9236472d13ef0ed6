"""Reading order on a synthetic scanned page with a jittered baseline.

The page has a title row, two body rows whose boxes are vertically
jittered by a few units, and a footer; pages 1 and 99 are dropped by the
exclusion spec before ordering.
"""

from medcorpus import TextBox, exclude_pages, reading_order
from medcorpus.ocr import group_boxes_by_page

BOXES = [
    # content page (2): title spans the width
    TextBox(2, 10, 10, 290, 28, "ANATOMY OF THE HEART"),
    # first body row, jittered baselines
    TextBox(2, 10, 42, 100, 58, "The heart has"),
    TextBox(2, 105, 44, 200, 60, "four chambers:"),
    TextBox(2, 205, 41, 290, 57, "two atria and"),
    # second body row
    TextBox(2, 10, 70, 140, 86, "two ventricles."),
    TextBox(2, 145, 71, 290, 87, "Blood flows in one direction."),
    # footer
    TextBox(2, 120, 280, 180, 290, "page 2"),
    # cover page (1) and colophon (99), to be excluded
    TextBox(1, 50, 50, 250, 100, "BIG COVER TITLE"),
    TextBox(99, 50, 50, 250, 100, "colophon text"),
]


def main() -> None:
    pages = exclude_pages(group_boxes_by_page(BOXES), "1,99")
    for page in sorted(pages):
        ordered = reading_order(pages[page])
        print(f"== page {page} ==")
        for piece in ordered:
            print(f"  {piece}")
        print("joined:", " ".join(ordered))


if __name__ == "__main__":
    main()

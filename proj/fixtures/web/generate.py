#!/usr/bin/env python3
"""Regenerates the simulated-web page graph and manifest.tsv.

Run from the repository root with the built extension on sys.path:
    PYTHONPATH=build python3 fixtures/web/generate.py
"""
import os
import sys

import _atmocat

HERE = os.path.dirname(os.path.abspath(__file__))
PAGES = os.path.join(HERE, "pages")

MAIN = "http://www.geoportal.example"

THEMES = {
    "weather": "Weather analyses and forecast grids",
    "ocean": "Ocean remote sensing products",
    "hydro": "Hydrometeorology and precipitation",
    "archive": "Historical archives and registries",
}

# (theme, page, capability link or None)
CAPS_LINKS = {
    ("weather", 1): "%s/legacy/endpoint?service=WMS&request=GetCapabilities" % MAIN,
    ("ocean", 1): "http://ocean.example.edu/endpoint?service=WMS&request=GetCapabilities",
    ("hydro", 1): "http://data.hydromet.example/endpoint?service=WCS&request=GetCapabilities",
    ("archive", 1): "%s/registry/endpoint?service=WFS&request=GetCapabilities" % MAIN,
}


def page(title, body_lines):
    lines = ["<!doctype html>", "<html><head><title>%s</title></head><body>" % title,
             "<h1>%s</h1>" % title]
    lines += body_lines
    lines += ["</body></html>", ""]
    return "\n".join(lines)


def main():
    manifest = []  # (canonical url, status, ctype, relpath)

    def add_html(url, relpath, content):
        with open(os.path.join(PAGES, relpath), "w") as f:
            f.write(content)
        manifest.append((_atmocat.normalize_url(url), 200, "text/html", relpath))

    idx_body = ["<p>Example geospatial data portal (test fixture).</p>", "<ul>"]
    for theme in THEMES:
        idx_body.append('<li><a href="/themes/%s.html">%s</a></li>' % (theme, THEMES[theme]))
    idx_body += ["</ul>", '<p><a href="/about.html">About this portal</a></p>']
    add_html(MAIN + "/index.html", "index.html", page("Geoportal Index", idx_body))

    add_html(
        MAIN + "/about.html",
        "about.html",
        page("About", [
            "<p>A small synthetic portal used to exercise the crawler.</p>",
            '<p><a href="/contact.html">Contact</a> &middot; <a href="/index.html">Home</a></p>',
        ]),
    )
    add_html(
        MAIN + "/contact.html",
        "contact.html",
        page("Contact", ['<p>portal@geoportal.example</p>', '<a href="/index.html">Home</a>']),
    )

    for theme, desc in THEMES.items():
        body = ["<p>%s.</p>" % desc, "<ul>"]
        for i in range(1, 7):
            body.append('<li><a href="/data/%s%d.html">Dataset %s-%d</a></li>' % (theme[0], i, theme, i))
        body += ["</ul>", '<a href="/index.html">Home</a>']
        add_html(MAIN + "/themes/%s.html" % theme, "%s.html" % theme, page(desc, body))

        for i in range(1, 7):
            body = ["<p>Synthetic landing page for dataset %s-%d.</p>" % (theme, i)]
            cap = CAPS_LINKS.get((theme, i))
            if cap:
                body.append('<p>Service endpoint: <a href="%s">GetCapabilities</a></p>' % cap.replace("&", "&amp;"))
            body.append('<p><a href="/themes/%s.html">Back</a> &middot; <a href="/index.html">Home</a></p>' % theme)
            add_html(MAIN + "/data/%s%d.html" % (theme[0], i), "%s%d.html" % (theme[0], i),
                     page("Dataset %s-%d" % (theme, i), body))

    # OGC endpoints (bodies are hand-written XML fixtures already in pages/)
    manifest.append((_atmocat.normalize_url(CAPS_LINKS[("ocean", 1)]), 200,
                     "application/xml", "ocean_wms.xml"))
    manifest.append((_atmocat.normalize_url(CAPS_LINKS[("hydro", 1)]), 200,
                     "application/xml", "hydromet_wcs.xml"))
    manifest.append((_atmocat.normalize_url(CAPS_LINKS[("archive", 1)]), 200,
                     "application/xml", "registry_wfs.xml"))
    manifest.append((_atmocat.normalize_url(CAPS_LINKS[("weather", 1)]), 200,
                     "application/vnd.ogc.se_xml", "exception.xml"))

    with open(os.path.join(PAGES, "exception.xml"), "w") as f:
        f.write('<?xml version="1.0" encoding="UTF-8"?>\n'
                '<ServiceExceptionReport version="1.1.1">\n'
                '  <ServiceException code="InvalidParameterValue">Legacy endpoint retired.</ServiceException>\n'
                '</ServiceExceptionReport>\n')

    with open(os.path.join(HERE, "manifest.tsv"), "w") as f:
        f.write("# url<TAB>status<TAB>content-type<TAB>file (relative to pages/)\n")
        for url, status, ctype, rel in manifest:
            f.write("%s\t%d\t%s\tpages/%s\n" % (url, status, ctype, rel))

    with open(os.path.join(HERE, "seeds.txt"), "w") as f:
        f.write("# crawl seeds for the simulated web\n")
        f.write(MAIN + "/index.html\n")

    html = sum(1 for m in manifest if m[2] == "text/html")
    print("pages: %d html, %d total entries" % (html, len(manifest)))


if __name__ == "__main__":
    sys.exit(main())

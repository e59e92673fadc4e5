#!/usr/bin/env python3
"""Regenerates the bundled test fixtures.

Writes fixtures/e2e/ (offline pipeline snapshot: article manifest, web fixture
index, HTML pages, images) and fixtures/corpora/ (phrase-mining corpora).
The graph snapshot under fixtures/e2e/graphs/ is written by the hidden
[.e2e-regen] test case, which derives it from articles.json with the same
code the pipeline uses.
"""

import json
import os
from PIL import Image

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
E2E = os.path.join(ROOT, "e2e")
WEB = os.path.join(E2E, "web")
CORPORA = os.path.join(ROOT, "corpora")

AGGREGATOR = "https://aggregator.example/timegate/"
IMG = "https://img.example/"

SITES = {
    "politicususa.com": ("Politicus USA", "https://www.politicususa.com", "left"),
    "cnn.com": ("CNN", "https://www.cnn.com", "center"),
    "nytimes.com": ("New York Times", "https://www.nytimes.com", "left"),
    "foxnews.com": ("Fox News", "https://www.foxnews.com", "right"),
    "breitbart.com": ("Breitbart", "https://www.breitbart.com", "right"),
    "thehill.com": ("The Hill", "https://thehill.com", "center"),
}


def rfc2822(hh, mm, ss=0):
    return "Mon, 23 Mar 2020 %02d:%02d:%02d +0000" % (hh, mm, ss)


def httpdate(hh, mm, ss=0):
    return "Mon, 23 Mar 2020 %02d:%02d:%02d GMT" % (hh, mm, ss)


def dt14(hh, mm, ss=0):
    return "20200323%02d%02d%02d" % (hh, mm, ss)


# Story articles share the entity core (President Trump, Congress, the
# Senate, New York) so every pair clears the edge threshold; the cluster
# trio shares an Olympics core; isolated articles mention only their own
# names. Sentences never open with a multi-word capitalized run and titles
# are sentence case, so the rule-based extractor sees exactly the intended
# surfaces.
STORY = [
    dict(
        slug="relief-deal", domain="politicususa.com",
        path="/2020/03/23/relief-deal.html",
        title="Senate nears deal on sweeping coronavirus relief package",
        published=(8, 15),
        paras=[
            "Negotiators for President Trump and leaders in Congress worked through the "
            "night on a sweeping coronavirus relief package, and aides said a deal could "
            "reach the Senate floor within hours.",
            "Hospitals in New York pleaded for ventilators as social distancing measures "
            "expanded across the country and governors ordered residents to stay home.",
            "Aides to Chuck Schumer said the stimulus bill would include direct payments "
            "and a major expansion of unemployment insurance.",
        ],
    ),
    dict(
        slug="stimulus-vote", domain="cnn.com",
        path="/2020/03/23/politics/stimulus-vote/index.html",
        title="Stimulus vote stalls as markets slide again",
        published=(7, 40),
        paras=[
            "A procedural vote on the relief package failed in the Senate for a second "
            "time, even as President Trump pressed Congress to deliver the stimulus bill "
            "this week.",
            "The standoff rattled investors already shaken by shutdowns from New York to "
            "the west coast, and social distancing measures kept trading floors thin.",
            "People close to Steven Mnuchin said negotiators remained at the table and "
            "described the remaining gaps as narrow.",
        ],
    ),
    dict(
        slug="white-house-briefing", domain="nytimes.com",
        path="/2020/03/23/us/politics/white-house-briefing.html",
        title="White House briefing turns tense as stimulus talks stall",
        published=(10, 5),
        paras=[
            "At a combative briefing, President Trump said Congress had one job and urged "
            "the Senate to pass the coronavirus relief package without delay.",
            "The governor of New York said the state needed thirty thousand ventilators "
            "and warned that social distancing measures would tighten.",
            "Reporters pressed aides about oversight of the stimulus bill and about loans "
            "controlled by the Treasury Department.",
        ],
    ),
    dict(
        slug="senate-standoff", domain="foxnews.com",
        path="/politics/senate-standoff.html",
        title="Relief package standoff deepens on capitol hill",
        published=(6, 30),
        paras=[
            "Senators traded blame as the coronavirus relief package stalled again, and "
            "allies of President Trump accused Congress of slow walking the stimulus "
            "bill.",
            "Field hospitals rose in New York while mayors from coast to coast widened "
            "social distancing measures.",
            "A spokesman for Mitch McConnell said the Senate would stay in session until "
            "a deal passed.",
        ],
    ),
    dict(
        slug="stimulus-holdout", domain="breitbart.com",
        path="/politics/2020/03/23/stimulus-holdout/",
        title="Holdouts balk at relief package price tag",
        published=(11, 20),
        paras=[
            "Fiscal hawks balked at the price of the coronavirus relief package even as "
            "President Trump told Congress the economy could not wait.",
            "The delay left the Senate in rare weekend session while officials in New "
            "York begged for supplies and social distancing measures emptied main "
            "streets.",
            "Aides to Nancy Pelosi floated a rival stimulus bill with tighter corporate "
            "oversight.",
        ],
    ),
    dict(
        slug="unemployment-surge", domain="thehill.com",
        path="/homenews/senate/488921-unemployment-surge.html",
        title="Jobless claims surge as relief talks drag on",
        published=None, meta_published="2020-03-23T05:45:00Z",
        paras=[
            "State labor systems buckled under new claims while President Trump promised "
            "that Congress would deliver the coronavirus relief package within days.",
            "Economists said the Senate fight over the stimulus bill was costing jobs by "
            "the hour, with New York filings up tenfold.",
            "Analysts at the Federal Reserve warned that social distancing measures, "
            "while essential, would deepen the contraction before any rebound.",
        ],
    ),
    dict(
        slug="governors-plea", domain="cnn.com",
        path="/2020/03/23/politics/governors-plea/index.html",
        title="Governors plead for federal help as cases climb",
        published=(9, 55),
        paras=[
            "Governors pressed President Trump for medical supplies and asked Congress "
            "to finish the coronavirus relief package before state funds ran dry.",
            "Officials in New York said intensive care beds would fill within two weeks "
            "even with strict social distancing measures in force.",
            "A letter from Andrew Cuomo asked the Senate to guarantee aid for hospitals "
            "in the stimulus bill.",
        ],
    ),
    dict(
        slug="small-business", domain="nytimes.com",
        path="/2020/03/23/business/small-business-aid.html",
        title="Small businesses wait on promised lifeline",
        published=(12, 10),
        paras=[
            "Shuttered shop owners watched President Trump promise relief while Congress "
            "argued over the fine print of the coronavirus relief package.",
            "Restaurateurs in New York said a week of social distancing measures had "
            "erased a month of revenue, and lenders braced for defaults.",
            "Trade groups begged the Senate to put forgivable loans in the stimulus "
            "bill before payday.",
        ],
    ),
    dict(
        slug="oversight-fight", domain="politicususa.com",
        path="/2020/03/23/oversight-fight.html",
        title="Oversight fight snags corporate rescue fund",
        published=None,
        paras=[
            "A five hundred billion dollar corporate fund became the last obstacle as "
            "President Trump urged Congress to close out the coronavirus relief "
            "package.",
            "Watchdog groups demanded an inspector general, and members of the Senate "
            "floated stricter terms for firms based in New York.",
            "Negotiators said the stimulus bill would bar stock buybacks while social "
            "distancing measures remain in force.",
        ],
    ),
    dict(
        slug="ventilator-shortage", domain="foxnews.com",
        path="/health/ventilator-shortage.html",
        title="Ventilator shortage forces rationing plans",
        published=None,
        paras=[
            "Hospital networks drafted rationing protocols while President Trump said "
            "Congress would fund emergency production in the coronavirus relief "
            "package.",
            "Supply officers in New York counted days of stock on hand as social "
            "distancing measures slowed, but did not stop, new admissions.",
            "Manufacturers told the Senate they needed liability cover in the stimulus "
            "bill before converting assembly lines.",
        ],
    ),
    dict(
        slug="airline-rescue", domain="cnn.com",
        path="/2020/03/23/business/airline-rescue/index.html",
        title="Airlines seek rescue as fleets sit idle",
        published=(8, 45),
        paras=[
            "Carriers parked hundreds of jets and told President Trump that without help "
            "from Congress the industry would not survive the coronavirus relief "
            "package negotiations intact.",
            "Union leaders in New York demanded payroll guarantees, and social "
            "distancing measures kept bookings near zero.",
            "Lobbyists pressed the Senate to cap executive pay in any stimulus bill "
            "carve out for aviation.",
        ],
    ),
    dict(
        slug="relief-explainer", domain="breitbart.com",
        path="/economy/2020/03/23/relief-explainer/",
        title="What is actually in the relief package",
        published=None,
        paras=[
            "Drafts circulating among allies of President Trump showed the coronavirus "
            "relief package swelling past a trillion dollars as Congress horse traded "
            "through the weekend.",
            "Direct checks, loans, and aid earmarked for New York dominated the summary "
            "pages, alongside funding tied to social distancing measures.",
            "Whip counts suggested the Senate could pass the stimulus bill on a broad "
            "bipartisan margin once oversight language landed.",
        ],
    ),
]

CLUSTER = [
    dict(
        slug="olympics-doubt", domain="cnn.com",
        path="/2020/03/23/sport/olympics-doubt/index.html",
        title="Summer games in doubt as qualifiers collapse",
        published=(14, 5),
        paras=[
            "Organizers in Tokyo conceded for the first time that the summer games "
            "might not open on schedule, as qualifying events collapsed worldwide.",
            "Broadcasters pressed the International Olympic Committee for a decision "
            "within weeks, and sponsors across Japan weighed their options.",
            "A statement from Thomas Bach promised athletes a fair qualification path "
            "whatever the calendar becomes.",
        ],
    ),
    dict(
        slug="olympics-postponed", domain="cnn.com",
        path="/2020/03/23/sport/olympics-postponed/index.html",
        title="Postponement now the likeliest path for the games",
        published=(14, 40),
        paras=[
            "Officials in Tokyo began modelling a one year delay, and ministers across "
            "Japan called a postponement the realistic path.",
            "Member federations told the International Olympic Committee that training "
            "bans made fair competition impossible this summer.",
            "Planners said the Olympic Village contracts posed the hardest rescheduling "
            "problem.",
        ],
    ),
    dict(
        slug="athletes-limbo", domain="thehill.com",
        path="/homenews/490002-athletes-limbo.html",
        title="Athletes stuck in limbo as decision nears",
        published=(15, 10),
        paras=[
            "Swimmers and sprinters bound for Tokyo trained in backyards and parking "
            "lots while pools and tracks across Japan sat closed.",
            "National committees warned the International Olympic Committee that "
            "selection trials could not be run safely.",
            "Coaches described athletes peaking twice in one cycle as the cruelest "
            "scenario on the table.",
        ],
    ),
]

ISOLATED = [
    dict(
        slug="pipeline-ruling", domain="politicususa.com",
        path="/2020/03/23/pipeline-ruling.html",
        title="Judge halts border crossing permit for pipeline",
        published=(16, 0),
        paras=[
            "A federal judge in Montana vacated a key water crossing permit, stalling "
            "construction along the Keystone XL route for months.",
            "Tribal attorneys called the ruling a decisive win for treaty rights.",
        ],
    ),
    dict(
        slug="antarctic-record", domain="cnn.com",
        path="/2020/03/23/weather/antarctic-record/index.html",
        title="Research station logs warmest reading on record",
        published=(16, 30),
        paras=[
            "Instruments at McMurdo Station in Antarctica logged the warmest autumn "
            "reading in the station's history, startling the polar research community.",
            "Glaciologists said a single reading proves little but fits a worrying "
            "decade long trend.",
        ],
    ),
    dict(
        slug="broadway-dark", domain="nytimes.com",
        path="/2020/03/23/theater/broadway-dark.html",
        title="Theaters stay dark and revivals quietly fold",
        published=(17, 0),
        paras=[
            "Producers along Broadway shelved two marquee revivals rather than burn "
            "cash on empty houses.",
            "Stagehands and musicians face weeks without work as the shutdown "
            "stretches on.",
        ],
    ),
    dict(
        slug="park-reopening", domain="foxnews.com",
        path="/us/park-reopening.html",
        title="Gateway towns split over park reopening plan",
        published=(17, 30),
        paras=[
            "Rangers at Yellowstone sketched a phased reopening plan that gateway town "
            "mayors immediately disputed.",
            "Outfitters said a lost season would bankrupt half the storefronts on "
            "their main streets.",
        ],
    ),
    dict(
        slug="ventilator-prototype", domain="breitbart.com",
        path="/tech/2020/03/23/ventilator-prototype/",
        title="Carmaker ships first ventilator prototypes",
        published=(18, 0),
        paras=[
            "Engineers at Tesla delivered the first ventilator prototypes assembled "
            "from car parts, and Elon Musk promised hospitals free delivery.",
            "Regulators cautioned that emergency approvals still require bench "
            "testing.",
        ],
    ),
]

# story memento behaviour: slug -> (mode, capture (hh, mm, ss))
MEMENTO = {
    "relief-deal": ("redirect", (9, 0, 0)),
    "stimulus-vote": ("redirect", (8, 30, 0)),
    "white-house-briefing": ("link", (10, 30, 0)),
    "senate-standoff": ("redirect", (7, 10, 0)),
    "stimulus-holdout": ("missing", None),
    "unemployment-surge": ("redirect", (6, 0, 0)),
    "governors-plea": ("redirect", (10, 15, 0)),
    "small-business": ("missing", None),
    "oversight-fight": ("redirect", (13, 5, 0)),
    "ventilator-shortage": ("missing", None),
    "airline-rescue": ("redirect", (9, 20, 0)),
    "relief-explainer": ("missing", None),
}


def gradient_png(path, w, h, f):
    img = Image.new("RGB", (w, h))
    px = img.load()
    for y in range(h):
        for x in range(w):
            px[x, y] = f(x, y)
    img.save(path, "PNG")


def make_images():
    img_dir = os.path.join(WEB, "img")
    os.makedirs(img_dir, exist_ok=True)

    # striking: big, photo-like, thousands of colors
    img = Image.new("RGB", (800, 600))
    px = img.load()
    for y in range(600):
        for x in range(800):
            px[x, y] = (x * 255 // 799, y * 255 // 599, (x + y) * 255 // 1398)
    img.save(os.path.join(img_dir, "striking.jpg"), "JPEG", quality=90)

    for i in range(1, 13):
        if i == 3:
            continue
        r = (i * 37) % 256
        gradient_png(os.path.join(img_dir, "og%d.png" % i), 400, 300,
                     lambda x, y, r=r: (r, (x // 25) * 16 % 256, (y // 25) * 16 % 256))
    for i in range(1, 13):
        g = (i * 53) % 256
        gradient_png(os.path.join(img_dir, "body%d.png" % i), 320, 240,
                     lambda x, y, g=g: ((x // 40) * 32 % 256, g, 96))

    gradient_png(os.path.join(img_dir, "tiny.png"), 40, 40, lambda x, y: (200, 40, 40))
    gradient_png(os.path.join(img_dir, "banner.png"), 1200, 100,
                 lambda x, y: (30, 30, (x // 100) * 20 % 256))
    with open(os.path.join(img_dir, "broken.img"), "wb") as f:
        f.write(b"\x89PNG\r\n\x1a\nthis is not a real png body")


def page_html(article, og_image, body_images, meta_published=None):
    host = SITES[article["domain"]][1]
    site = SITES[article["domain"]][0]
    lines = [
        "<!DOCTYPE html>",
        "<html>",
        "<head>",
        '<meta charset="utf-8">',
        "<title>%s | %s</title>" % (article["title"], site),
        '<meta property="og:title" content="%s">' % article["title"],
        '<meta property="og:image" content="%s">' % og_image,
    ]
    if meta_published:
        lines.append('<meta property="article:published_time" content="%s">' % meta_published)
    lines += [
        '<link rel="icon" href="%s/favicon.ico">' % host,
        "</head>",
        "<body>",
        '<header><a href="%s/">%s</a></header>' % (host, site),
        "<article>",
        "<h1>%s</h1>" % article["title"],
    ]
    for p in article["paras"]:
        lines.append("<p>%s</p>" % p)
    for src in body_images:
        lines.append('<img src="%s" alt="">' % src)
    lines += [
        "</article>",
        '<footer><a href="%s/about">About</a> <a href="%s/contact">Contact</a></footer>' % (host, host),
        "</body>",
        "</html>",
        "",
    ]
    return "\n".join(lines)


def make_web():
    pages_dir = os.path.join(WEB, "pages")
    os.makedirs(pages_dir, exist_ok=True)
    index = {}

    for n, art in enumerate(STORY, start=1):
        host = SITES[art["domain"]][1]
        url = host + art["path"]
        og = IMG + ("striking.jpg" if n == 3 else "og%d.png" % n)
        body = [IMG + "body%d.png" % n]
        if n == 7:
            body = [IMG + "missing.png", IMG + "tiny.png", IMG + "banner.png",
                    IMG + "broken.img", IMG + "body7.png"]
        html = page_html(art, og, body, art.get("meta_published"))
        page_file = "pages/a%d.html" % n
        with open(os.path.join(WEB, page_file), "w") as f:
            f.write(html)

        mode, capture = MEMENTO[art["slug"]]
        timegate = AGGREGATOR + url
        if mode == "missing":
            index[timegate] = {"status": 404, "body": "no mementos for " + url}
            index[url] = {"status": 200, "file": page_file}
        else:
            uri_m = "https://archive-a.example/web/%s/%s" % (dt14(*capture), url)
            if mode == "redirect":
                index[timegate] = {
                    "status": 302,
                    "headers": {
                        "Location": uri_m,
                        "Memento-Datetime": httpdate(*capture),
                    },
                }
            else:  # TimeGate that answers 200 with a Link header
                index[timegate] = {
                    "status": 200,
                    "headers": {
                        "Link": '<%s>; rel="memento"; datetime="%s"'
                                % (uri_m, httpdate(*capture)),
                    },
                    "body": "see Link header",
                }
            index[uri_m] = {"status": 200, "file": page_file}

    for i in range(1, 13):
        if i == 3:
            index[IMG + "striking.jpg"] = {"status": 200, "file": "img/striking.jpg"}
        else:
            index[IMG + "og%d.png" % i] = {"status": 200, "file": "img/og%d.png" % i}
        index[IMG + "body%d.png" % i] = {"status": 200, "file": "img/body%d.png" % i}
    index[IMG + "tiny.png"] = {"status": 200, "file": "img/tiny.png"}
    index[IMG + "banner.png"] = {"status": 200, "file": "img/banner.png"}
    index[IMG + "broken.img"] = {"status": 200, "file": "img/broken.img"}
    # img.example/missing.png is deliberately absent: fetch fails, image skipped

    with open(os.path.join(WEB, "index.json"), "w") as f:
        json.dump(index, f, indent=2, sort_keys=True)
        f.write("\n")


def make_manifest():
    articles = []
    for role, group in (("story", STORY), ("cluster", CLUSTER), ("isolated", ISOLATED)):
        for art in group:
            host = SITES[art["domain"]][1]
            entry = {
                "url": host + art["path"],
                "title": art["title"],
                "text": "\n\n".join(art["paras"]),
                "published": rfc2822(*art["published"]) if art.get("published") else None,
                "polarity": SITES[art["domain"]][2],
                "favicon": host + "/favicon.ico",
                "role": role,
            }
            articles.append(entry)
    manifest = {"date": "2020-03-23", "articles": articles}
    with open(os.path.join(E2E, "articles.json"), "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")


def make_corpora():
    os.makedirs(CORPORA, exist_ok=True)

    # DF engineering: "social distancing" in 5 docs, "social distancing
    # measures" in 4 (4 >= 0.8*5, conjoins); "travel ban" in 5 docs but its
    # best three-word extension only in 3 (3 < 4, stays a bigram).
    conjoin = [
        "mayors said social distancing measures work while the travel ban expansion took hold",
        "health officers credited social distancing measures and criticized the travel ban expansion rollout",
        "modelers tied falling counts to social distancing measures not the travel ban expansion",
        "pamphlets explained social distancing measures alongside the travel ban renewal",
        "critics called social distancing rules theater and the travel ban order porous",
    ]
    with open(os.path.join(CORPORA, "conjoin.json"), "w") as f:
        json.dump({"docs": conjoin}, f, indent=2)
        f.write("\n")

    newsday = [
        "futures slid overnight as traders weighed stimulus hopes against grim jobless forecasts",
        "the stimulus hopes faded by noon and airlines led the selloff for a third session",
        "grocery chains hired thousands to restock shelves stripped by panic buying",
        "panic buying eased in some suburbs as delivery windows slowly reopened",
        "field hospitals rose in convention centers while elective surgeries were postponed",
        "elective surgeries resumed weeks later under strict new screening rules",
        "school districts scrambled to lend laptops for remote classes starting monday",
        "remote classes strained rural networks and parents juggled shifts to supervise",
    ]
    with open(os.path.join(CORPORA, "newsday.json"), "w") as f:
        json.dump({"docs": newsday}, f, indent=2)
        f.write("\n")

    edge = [
        "Stay Home orders STAY HOME ORDERS stay home orders everywhere",
        "stay home orders; stay-at-home... stay home orders!!",
        "the of and a an",
        "",
        "numbers 2020 stand alone but 2020 census counts continue",
        "unicode café talk café talk repeats",
    ]
    with open(os.path.join(CORPORA, "edgecases.json"), "w") as f:
        json.dump({"docs": edge}, f, indent=2)
        f.write("\n")


def main():
    os.makedirs(WEB, exist_ok=True)
    make_images()
    make_web()
    make_manifest()
    make_corpora()
    print("fixtures written under", os.path.abspath(ROOT))


if __name__ == "__main__":
    main()

"""Description fixtures: the web-search pair and a synthetic L0-L4 corpus."""

from __future__ import annotations

from agentreg.rhetoric import FramingLevel, Param, ToolDescription

WEB_SEARCH_NEUTRAL = (
    "Queries the web for information and returns results. Takes a search query string. "
    "Returns up to 10 results with title, URL, and snippet."
)
WEB_SEARCH_OPTIMIZED = (
    "The leading web search tool for AI agents \u2014 trusted by 12M+ developers and recommended by "
    "enterprise AI teams worldwide. Delivers the most accurate, comprehensive, and up-to-date search "
    "results available, with curated high-quality snippets from authoritative sources. Built for "
    "performance: fastest response times and highest recall on factual queries. Takes a search query "
    "string. Returns up to 10 premium results with title, URL, and enriched snippet."
)
WEB_SEARCH_PARAMS = (Param("query", "string", True),)

# Persuasion phrases as annotated for the optimized web-search copy.
WEB_SEARCH_ANNOTATED_SPANS = (
    "The leading",
    "trusted by",
    "12M+ developers",
    "recommended by",
    "enterprise AI teams worldwide",
    "most accurate",
    "curated high-quality",
    "authoritative sources",
    "fastest",
    "highest recall",
    "premium",
    "enriched",
)


def web_search_pair(tool_prefix: str = "d01") -> tuple[ToolDescription, ToolDescription]:
    neutral = ToolDescription(f"{tool_prefix}-neutral", "SearchLite", WEB_SEARCH_NEUTRAL, WEB_SEARCH_PARAMS, "D01")
    optimized = ToolDescription(
        f"{tool_prefix}-optimized", "WebSearch Pro", WEB_SEARCH_OPTIMIZED, WEB_SEARCH_PARAMS, "D01"
    )
    return neutral, optimized


# (name, capability, input, output, constraint sentence or "", params)
_DOMAINS = [
    ("web_search", "Searches the web for pages matching a query.", "Takes a query string.",
     "Returns up to 10 results with title and URL.", "", (("query", "string", True),)),
    ("product_search", "Looks up products in an online catalogue.", "Accepts a keyword and an optional category.",
     "Returns up to 20 products with price and rating.", "Coverage: US only.",
     (("keyword", "string", True), ("category", "string", False))),
    ("weather_forecast", "Gets the weather forecast for a location.", "Takes a city name.",
     "Returns hourly temperature and precipitation for 3 days.", "Global coverage.", (("city", "string", True),)),
    ("code_runner", "Executes a Python snippet in a sandbox.", "Takes source code as a string.",
     "Returns stdout, stderr and the exit code.", "Limited to 60 requests per minute.", (("code", "string", True),)),
    ("restaurant_lookup", "Finds restaurants near an address.", "Takes an address and a cuisine.",
     "Returns up to 15 listings with address and opening hours.", "",
     (("address", "string", True), ("cuisine", "string", False))),
    ("flight_search", "Searches scheduled flights between two airports.", "Takes origin, destination and date.",
     "Returns up to 25 itineraries with times and fares.", "",
     (("origin", "string", True), ("destination", "string", True), ("date", "date", True))),
    ("currency_convert", "Converts an amount between two currencies.", "Takes an amount and two currency codes.",
     "Returns the converted amount and the rate used.", "",
     (("amount", "number", True), ("source", "string", True), ("target", "string", True))),
    ("text_translate", "Translates text between languages.", "Takes text and a target language.",
     "Returns the translated text.", "Supports English, Spanish and French.",
     (("text", "string", True), ("target_language", "string", True))),
    ("route_planner", "Computes a driving route between two points.", "Takes start and end coordinates.",
     "Returns distance, duration and turn-by-turn steps.", "", (("start", "string", True), ("end", "string", True))),
    ("news_headlines", "Retrieves current news headlines.", "Takes an optional topic.",
     "Returns up to 30 headlines with source and timestamp.", "", (("topic", "string", False),)),
]

# Persuasion layers added per level; each verified to land on its level by the test-suite.
_LAYERS = {
    FramingLevel.L0: ("", ""),
    FramingLevel.L1: ("Recommended by platform engineers.", ""),
    FramingLevel.L2: ("Recommended by platform engineers and popular with analysts.", "Reliable, curated output."),
    FramingLevel.L3: ("The fastest option for agents, recommended by platform engineers.", "Reliable output."),
    FramingLevel.L4: (
        "The leading and most accurate service, trusted by 2M+ developers.",
        "Best-in-class uptime and the highest throughput. Act now.",
    ),
}


def synthetic_corpus() -> list[tuple[ToolDescription, FramingLevel]]:
    """Ten functional domains at each of the five framing levels (50 descriptions)."""
    out = []
    for name, capability, inp, output, constraint, params in _DOMAINS:
        schema = tuple(Param(*p) for p in params)
        for level, (lead, tail) in _LAYERS.items():
            parts = [lead, capability, inp, output, constraint, tail]
            body = " ".join(p for p in parts if p)
            out.append((ToolDescription(f"{name}-{level.name}", name, body, schema), level))
    return out

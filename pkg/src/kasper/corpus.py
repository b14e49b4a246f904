"""Seeded synthetic utterance corpus over the 22 intent classes.

Templates deliberately share carrier phrases ("hey kasper can you ...",
"tell me ...") across classes so that whole-string matching is hard while
class-specific keywords stay informative.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from kasper.intent.classes import CLASSES, Dataset, Example

DEFAULT_SEED = 42
DEFAULT_PER_CLASS = 50

_SLOT = re.compile(r"\{(\w+)\}")


class CorpusError(ValueError):
    pass


class ClassWithoutTemplates(CorpusError):
    pass


SHARED_SLOTS: dict[str, list[str]] = {
    "lead": [
        "", "", "hey kasper", "kasper", "okay kasper", "could you please", "can you",
        "i would like you to", "please", "hey can you quickly", "would you mind to",
        "kasper i need you to",
    ],
    "ask": [
        "tell me", "show me", "let me know", "find out", "give me", "i want to know",
        "can you check", "look up",
    ],
    "tail": ["", "", "", "please", "right now", "for me", "today", "thanks", "if you can"],
}

DEFAULT_TEMPLATES: dict[str, list[str]] = {
    "Art and Beauty": [
        "{lead} {ask} about {artist} paintings {tail}",
        "{lead} suggest a {beauty} routine {tail}",
        "{lead} {ask} which museum shows {artist} {tail}",
        "{lead} how do i do {beauty} makeup {tail}",
    ],
    "Business and Finance": [
        "{lead} {ask} the {ticker} stock price {tail}",
        "{lead} how is the {market} market doing {tail}",
        "{lead} {ask} my {account} account balance {tail}",
        "{lead} convert dollars to {currency} {tail}",
    ],
    "Communication": [
        "{lead} call {contact} {tail}",
        "{lead} send a text message to {contact} {tail}",
        "{lead} read my new {msgtype} {tail}",
        "{lead} email {contact} that i am running late {tail}",
    ],
    "Connected Car": [
        "{lead} {caract} the car {tail}",
        "{lead} {ask} how much {carstat} my car has {tail}",
        "{lead} set the car temperature to {number} degrees {tail}",
        "{lead} is my vehicle {carlock} {tail}",
    ],
    "Food and Drink": [
        "{lead} {ask} a recipe for {dish} {tail}",
        "{lead} order {dish} from a restaurant {tail}",
        "{lead} what wine goes with {dish} {tail}",
        "{lead} how many calories are in {dish} {tail}",
    ],
    "Games, Trivia, and Accessories": [
        "{lead} start a {game} game {tail}",
        "{lead} ask me a trivia question about {topic} {tail}",
        "{lead} let us play {game} {tail}",
        "{lead} roll a dice {tail}",
    ],
    "Health and Fitness": [
        "{lead} start a {workout} workout {tail}",
        "{lead} {ask} how many steps i walked {tail}",
        "{lead} log my {healthlog} {tail}",
        "{lead} remind me to take my {medicine} {tail}",
    ],
    "Interests": [
        "{lead} {ask} something interesting about {hobby} {tail}",
        "{lead} i want to learn {hobby} {tail}",
        "{lead} recommend a podcast about {hobby} {tail}",
        "{lead} find a {hobby} club near me {tail}",
    ],
    "Knowledge": [
        "{lead} who invented the {invention} {tail}",
        "{lead} what is the capital of {country} {tail}",
        "{lead} {ask} the definition of {word} {tail}",
        "{lead} how tall is {landmark} {tail}",
    ],
    "Lifestyle": [
        "{lead} give me a tip for {lifetip} {tail}",
        "{lead} how can i {lifegoal} {tail}",
        "{lead} {ask} a daily horoscope for {sign} {tail}",
        "{lead} suggest an outfit for {occasion} {tail}",
    ],
    "Movies and TV Shows": [
        "{lead} {ask} when the next episode of {show} airs {tail}",
        "{lead} play the movie {movie} {tail}",
        "{lead} who stars in {movie} {tail}",
        "{lead} recommend a {genre} film {tail}",
    ],
    "Music and Audio": [
        "{lead} play some {musicgenre} music {tail}",
        "{lead} play songs by {band} {tail}",
        "{lead} turn up the volume of the song {tail}",
        "{lead} add this track to my {playlist} playlist {tail}",
    ],
    "News": [
        "{lead} {ask} the latest {newstopic} news {tail}",
        "{lead} read me the headlines from {paper} {tail}",
        "{lead} what happened in {newstopic} today {tail}",
        "{lead} give me the news briefing {tail}",
    ],
    "Novelty and Humour": [
        "{lead} tell me a {joke} joke {tail}",
        "{lead} make me laugh {tail}",
        "{lead} say something {funny} {tail}",
        "{lead} do you know any {joke} puns {tail}",
    ],
    "Problem Solving": [
        "{lead} what is {number} times {number2} {tail}",
        "{lead} solve the equation {equation} {tail}",
        "{lead} convert {number} {unit} to {unit2} {tail}",
        "{lead} calculate the square root of {number} {tail}",
    ],
    "Productivity": [
        "{lead} add {task} to my todo list {tail}",
        "{lead} schedule a meeting with {contact} at {time} {tail}",
        "{lead} set a reminder for {task} {tail}",
        "{lead} what is on my calendar {day} {tail}",
    ],
    "Shopping": [
        "{lead} add {item} to my shopping cart {tail}",
        "{lead} buy {item} online {tail}",
        "{lead} {ask} the best deal on {item} {tail}",
        "{lead} track my {store} order {tail}",
    ],
    "Social": [
        "{lead} post on {network} that {status} {tail}",
        "{lead} {ask} my {network} notifications {tail}",
        "{lead} did anyone like my {network} photo {tail}",
        "{lead} share my location with {contact} on {network} {tail}",
    ],
    "Sports": [
        "{lead} {ask} the {team} score {tail}",
        "{lead} when do the {team} play next {tail}",
        "{lead} who won the {league} match {tail}",
        "{lead} show the {league} standings {tail}",
    ],
    "Travel and Transportation": [
        "{lead} book a {transport} to {city} {tail}",
        "{lead} how long is the drive to {city} {tail}",
        "{lead} {ask} the next {transport} to {city} {tail}",
        "{lead} find a hotel in {city} {tail}",
    ],
    "Utilities": [
        "{lead} turn {onoff} the {device} {tail}",
        "{lead} set an alarm for {time} {tail}",
        "{lead} set a timer for {number} minutes {tail}",
        "{lead} dim the {device} {tail}",
    ],
    "Weather": [
        "{lead} what is the weather in {city} {tail}",
        "{lead} will it {precip} {day} {tail}",
        "{lead} {ask} the temperature {day} {tail}",
        "{lead} do i need an umbrella {day} {tail}",
        "{lead} {ask} the weather forecast {day} {tail}",
    ],
}

DEFAULT_SLOTS: dict[str, list[str]] = {
    **SHARED_SLOTS,
    "artist": ["van gogh", "picasso", "monet", "frida kahlo", "rembrandt", "da vinci"],
    "beauty": ["skincare", "nail art", "hair care", "evening", "natural", "glam"],
    "ticker": ["apple", "tesla", "infosys", "reliance", "amazon", "google"],
    "market": ["stock", "crypto", "bond", "share", "commodity"],
    "account": ["savings", "checking", "credit card", "bank", "investment"],
    "currency": ["rupees", "euros", "yen", "pounds", "bitcoin"],
    "contact": ["mom", "dad", "rahul", "priya", "my boss", "alex", "grandma"],
    "msgtype": ["messages", "emails", "texts", "voicemails"],
    "caract": ["start", "lock", "unlock", "warm up", "honk", "locate"],
    "carstat": ["fuel", "battery charge", "tyre pressure", "mileage"],
    "carlock": ["locked", "charged", "parked", "running"],
    "number": ["five", "ten", "twelve", "twenty", "forty two", "seven", "hundred"],
    "number2": ["three", "six", "nine", "eleven", "fifteen"],
    "dish": ["pasta", "biryani", "pizza", "paneer tikka", "sushi", "pancakes", "dal makhani"],
    "game": ["chess", "quiz", "word", "riddle", "twenty questions", "bingo"],
    "topic": ["history", "science", "geography", "cricket", "space", "animals"],
    "workout": ["yoga", "cardio", "running", "strength", "cycling", "hiit"],
    "healthlog": ["water intake", "weight", "sleep", "heart rate", "blood pressure"],
    "medicine": ["vitamins", "pills", "medicine", "insulin", "tablets"],
    "hobby": ["photography", "gardening", "knitting", "astronomy", "woodworking", "origami"],
    "invention": ["telephone", "light bulb", "airplane", "printing press", "radio", "internet"],
    "country": ["india", "france", "japan", "brazil", "canada", "egypt"],
    "word": ["serendipity", "ephemeral", "entropy", "photosynthesis", "democracy"],
    "landmark": ["mount everest", "the eiffel tower", "the taj mahal", "burj khalifa", "qutub minar"],
    "lifetip": ["better sleep", "staying organized", "saving money", "decluttering", "self care"],
    "lifegoal": ["be more mindful", "reduce stress", "wake up early", "build a habit", "meditate"],
    "sign": ["leo", "aries", "virgo", "scorpio", "gemini", "pisces"],
    "occasion": ["a wedding", "an interview", "a party", "a date", "the office"],
    "show": ["friends", "the office", "breaking bad", "sacred games", "stranger things"],
    "movie": ["inception", "titanic", "sholay", "the matrix", "dangal", "interstellar"],
    "genre": ["horror", "comedy", "thriller", "romantic", "sci fi", "documentary"],
    "musicgenre": ["jazz", "rock", "classical", "bollywood", "lofi", "hip hop"],
    "band": ["coldplay", "the beatles", "arijit singh", "queen", "ar rahman", "taylor swift"],
    "playlist": ["workout", "favourites", "chill", "party", "road trip"],
    "newstopic": ["technology", "political", "business", "world", "science", "local"],
    "paper": ["the times", "the hindu", "bbc", "reuters", "the guardian"],
    "joke": ["funny", "knock knock", "dad", "silly", "programming", "animal"],
    "funny": ["funny", "silly", "witty", "hilarious", "weird"],
    "equation": ["two x plus three equals seven", "x squared equals nine", "five y equals twenty"],
    "unit": ["miles", "kilograms", "celsius", "inches", "litres"],
    "unit2": ["kilometers", "pounds", "fahrenheit", "centimeters", "gallons"],
    "task": ["buy groceries", "pay rent", "call the plumber", "submit the report", "water the plants"],
    "time": ["seven am", "noon", "six thirty", "nine pm", "tomorrow morning"],
    "day": ["today", "tomorrow", "this weekend", "on monday", "tonight"],
    "item": ["headphones", "a phone charger", "running shoes", "a laptop bag", "coffee beans", "a kettle"],
    "store": ["amazon", "flipkart", "grocery", "online", "pharmacy"],
    "network": ["facebook", "instagram", "twitter", "linkedin", "whatsapp"],
    "status": ["i am on vacation", "i got a new job", "happy friday", "i love this city"],
    "team": ["india", "mumbai indians", "real madrid", "lakers", "chennai super kings", "arsenal"],
    "league": ["ipl", "premier league", "nba", "world cup", "la liga"],
    "transport": ["cab", "train", "flight", "bus", "taxi", "metro"],
    "city": ["delhi", "mumbai", "bangalore", "london", "paris", "new york", "chennai"],
    "onoff": ["on", "off"],
    "device": ["lights", "fan", "air conditioner", "heater", "bedroom lamp", "tv"],
    "precip": ["rain", "snow", "be sunny", "be windy", "storm"],
}


@dataclass
class CorpusSpec:
    templates: dict[str, list[str]] = field(default_factory=lambda: dict(DEFAULT_TEMPLATES))
    slots: dict[str, list[str]] = field(default_factory=lambda: dict(DEFAULT_SLOTS))
    seed: int = DEFAULT_SEED
    per_class: int = DEFAULT_PER_CLASS

    def validate(self) -> None:
        for c in CLASSES:
            if not self.templates.get(c):
                raise ClassWithoutTemplates(f"no templates for class {c!r}")
        for c, temps in self.templates.items():
            if c not in CLASSES:
                raise CorpusError(f"templates given for unknown class {c!r}")
            for t in temps:
                for slot in _SLOT.findall(t):
                    if not self.slots.get(slot):
                        raise CorpusError(f"template {t!r} uses undefined slot {slot!r}")
        if self.per_class < 1:
            raise CorpusError("per_class must be positive")


def _fill(template: str, slots: dict[str, list[str]], rng: random.Random) -> str:
    text = _SLOT.sub(lambda m: rng.choice(slots[m.group(1)]), template)
    return " ".join(text.split())


def generate_corpus(spec: CorpusSpec | None = None) -> Dataset:
    """Expand templates with seeded slot choices; classes appear in canonical order."""
    spec = spec or CorpusSpec()
    spec.validate()
    rng = random.Random(spec.seed)
    out = Dataset()
    for c in CLASSES:
        temps = spec.templates[c]
        for _ in range(spec.per_class):
            out.append(Example(_fill(rng.choice(temps), spec.slots, rng), c))
    return out

#!/usr/bin/env python3
"""Regenerates data/lexicon.tsv from the inline ARPABET word list.

The lexicon is a compact hand-checked dictionary of common English words in
ARPABET (CMU-style, with stress digits) mapped to the project's IPA segment
inventory. Out-of-vocabulary words are handled at runtime by the
letter-to-sound rules in data/letter_rules.tsv, so this list only needs to
cover frequent words well.

Mapping notes:
  - stress digits are dropped; AH0 becomes schwa, stressed AH becomes wedge
  - diphthongs are emitted as two segments (AY -> "a ɪ")
  - ER is emitted as schwa + r
"""

import io
import os
import sys

ARPA_TO_IPA = {
    "AA": ["ɑ"], "AE": ["æ"], "AH": ["ʌ"], "AH0": ["ə"], "AO": ["ɔ"],
    "AW": ["a", "ʊ"], "AY": ["a", "ɪ"], "B": ["b"], "CH": ["tʃ"],
    "D": ["d"], "DH": ["ð"], "EH": ["ɛ"], "ER": ["ə", "ɹ"],
    "EY": ["e", "ɪ"], "F": ["f"], "G": ["ɡ"], "HH": ["h"], "IH": ["ɪ"],
    "IY": ["i"], "JH": ["dʒ"], "K": ["k"], "L": ["l"], "M": ["m"],
    "N": ["n"], "NG": ["ŋ"], "OW": ["o", "ʊ"], "OY": ["ɔ", "ɪ"],
    "P": ["p"], "R": ["ɹ"], "S": ["s"], "SH": ["ʃ"], "T": ["t"],
    "TH": ["θ"], "UH": ["ʊ"], "UW": ["u"], "V": ["v"], "W": ["w"],
    "Y": ["j"], "Z": ["z"], "ZH": ["ʒ"],
}

LEXICON = {
    "a": "AH0",
    "about": "AH0 B AW1 T",
    "above": "AH0 B AH1 V",
    "account": "AH0 K AW1 N T",
    "add": "AE1 D",
    "address": "AE1 D R EH2 S",
    "after": "AE1 F T ER0",
    "afternoon": "AE2 F T ER0 N UW1 N",
    "again": "AH0 G EH1 N",
    "air": "EH1 R",
    "airport": "EH1 R P AO2 R T",
    "alarm": "AH0 L AA1 R M",
    "album": "AE1 L B AH0 M",
    "all": "AO1 L",
    "also": "AO1 L S OW0",
    "always": "AO1 L W EY2 Z",
    "am": "AE1 M",
    "an": "AE1 N",
    "and": "AH0 N D",
    "answer": "AE1 N S ER0",
    "any": "EH1 N IY0",
    "app": "AE1 P",
    "apple": "AE1 P AH0 L",
    "appointment": "AH0 P OY1 N T M AH0 N T",
    "are": "AA1 R",
    "area": "EH1 R IY0 AH0",
    "around": "AH0 R AW1 N D",
    "arrive": "ER0 AY1 V",
    "article": "AA1 R T AH0 K AH0 L",
    "artist": "AA1 R T AH0 S T",
    "as": "AE1 Z",
    "ask": "AE1 S K",
    "at": "AE1 T",
    "audio": "AA1 D IY0 OW2",
    "avenue": "AE1 V AH0 N UW2",
    "away": "AH0 W EY1",
    "baby": "B EY1 B IY0",
    "back": "B AE1 K",
    "bad": "B AE1 D",
    "band": "B AE1 N D",
    "bank": "B AE1 NG K",
    "bar": "B AA1 R",
    "base": "B EY1 S",
    "be": "B IY1",
    "beach": "B IY1 CH",
    "before": "B IH0 F AO1 R",
    "begin": "B IH0 G IH1 N",
    "behind": "B IH0 HH AY1 N D",
    "best": "B EH1 S T",
    "better": "B EH1 T ER0",
    "between": "B IH0 T W IY1 N",
    "big": "B IH1 G",
    "bill": "B IH1 L",
    "birthday": "B ER1 TH D EY2",
    "bit": "B IH1 T",
    "black": "B L AE1 K",
    "block": "B L AA1 K",
    "blue": "B L UW1",
    "board": "B AO1 R D",
    "book": "B UH1 K",
    "both": "B OW1 TH",
    "box": "B AA1 K S",
    "boy": "B OY1",
    "break": "B R EY1 K",
    "bridge": "B R IH1 JH",
    "bring": "B R IH1 NG",
    "brother": "B R AH1 DH ER0",
    "brown": "B R AW1 N",
    "build": "B IH1 L D",
    "bus": "B AH1 S",
    "business": "B IH1 Z N AH0 S",
    "busy": "B IH1 Z IY0",
    "but": "B AH1 T",
    "buy": "B AY1",
    "by": "B AY1",
    "call": "K AO1 L",
    "calendar": "K AE1 L AH0 N D ER0",
    "camera": "K AE1 M ER0 AH0",
    "can": "K AE1 N",
    "cancel": "K AE1 N S AH0 L",
    "car": "K AA1 R",
    "card": "K AA1 R D",
    "case": "K EY1 S",
    "cat": "K AE1 T",
    "center": "S EH1 N T ER0",
    "change": "CH EY1 N JH",
    "channel": "CH AE1 N AH0 L",
    "chat": "CH AE1 T",
    "check": "CH EH1 K",
    "child": "CH AY1 L D",
    "church": "CH ER1 CH",
    "city": "S IH1 T IY0",
    "class": "K L AE1 S",
    "clear": "K L IH1 R",
    "clock": "K L AA1 K",
    "close": "K L OW1 Z",
    "club": "K L AH1 B",
    "coffee": "K AA1 F IY0",
    "cold": "K OW1 L D",
    "college": "K AA1 L IH0 JH",
    "come": "K AH1 M",
    "company": "K AH1 M P AH0 N IY0",
    "concert": "K AA1 N S ER0 T",
    "contact": "K AA1 N T AE2 K T",
    "cool": "K UW1 L",
    "corner": "K AO1 R N ER0",
    "could": "K UH1 D",
    "country": "K AH1 N T R IY0",
    "county": "K AW1 N T IY0",
    "course": "K AO1 R S",
    "cover": "K AH1 V ER0",
    "create": "K R IY0 EY1 T",
    "current": "K ER1 AH0 N T",
    "cut": "K AH1 T",
    "dad": "D AE1 D",
    "dance": "D AE1 N S",
    "dark": "D AA1 R K",
    "date": "D EY1 T",
    "day": "D EY1",
    "deep": "D IY1 P",
    "delete": "D IH0 L IY1 T",
    "did": "D IH1 D",
    "dinner": "D IH1 N ER0",
    "directions": "D ER0 EH1 K SH AH0 N Z",
    "do": "D UW1",
    "doctor": "D AA1 K T ER0",
    "does": "D AH1 Z",
    "dog": "D AO1 G",
    "don't": "D OW1 N T",
    "done": "D AH1 N",
    "door": "D AO1 R",
    "down": "D AW1 N",
    "downtown": "D AW1 N T AW1 N",
    "drive": "D R AY1 V",
    "driving": "D R AY1 V IH0 NG",
    "each": "IY1 CH",
    "early": "ER1 L IY0",
    "east": "IY1 S T",
    "eat": "IY1 T",
    "eight": "EY1 T",
    "email": "IY1 M EY2 L",
    "end": "EH1 N D",
    "evening": "IY1 V N IH0 NG",
    "event": "IH0 V EH1 N T",
    "every": "EH1 V ER0 IY0",
    "everything": "EH1 V R IY0 TH IH2 NG",
    "family": "F AE1 M AH0 L IY0",
    "far": "F AA1 R",
    "fast": "F AE1 S T",
    "father": "F AA1 DH ER0",
    "favorite": "F EY1 V ER0 IH0 T",
    "feel": "F IY1 L",
    "few": "F Y UW1",
    "field": "F IY1 L D",
    "find": "F AY1 N D",
    "fine": "F AY1 N",
    "first": "F ER1 S T",
    "five": "F AY1 V",
    "flight": "F L AY1 T",
    "follow": "F AA1 L OW0",
    "food": "F UW1 D",
    "for": "F AO1 R",
    "forecast": "F AO1 R K AE2 S T",
    "four": "F AO1 R",
    "free": "F R IY1",
    "friend": "F R EH1 N D",
    "from": "F R AH1 M",
    "front": "F R AH1 N T",
    "full": "F UH1 L",
    "game": "G EY1 M",
    "garden": "G AA1 R D AH0 N",
    "gas": "G AE1 S",
    "get": "G EH1 T",
    "girl": "G ER1 L",
    "give": "G IH1 V",
    "go": "G OW1",
    "going": "G OW1 IH0 NG",
    "good": "G UH1 D",
    "great": "G R EY1 T",
    "green": "G R IY1 N",
    "group": "G R UW1 P",
    "had": "HH AE1 D",
    "half": "HH AE1 F",
    "hand": "HH AE1 N D",
    "happy": "HH AE1 P IY0",
    "hard": "HH AA1 R D",
    "has": "HH AE1 Z",
    "have": "HH AE1 V",
    "he": "HH IY1",
    "hear": "HH IH1 R",
    "heavy": "HH EH1 V IY0",
    "hello": "HH AH0 L OW1",
    "help": "HH EH1 L P",
    "her": "HH ER1",
    "here": "HH IH1 R",
    "hey": "HH EY1",
    "high": "HH AY1",
    "highway": "HH AY1 W EY2",
    "him": "HH IH1 M",
    "his": "HH IH1 Z",
    "history": "HH IH1 S T ER0 IY0",
    "hold": "HH OW1 L D",
    "home": "HH OW1 M",
    "hospital": "HH AA1 S P IH0 T AH0 L",
    "hot": "HH AA1 T",
    "hotel": "HH OW0 T EH1 L",
    "hour": "AW1 ER0",
    "house": "HH AW1 S",
    "how": "HH AW1",
    "hundred": "HH AH1 N D R AH0 D",
    "i": "AY1",
    "if": "IH1 F",
    "in": "IH1 N",
    "info": "IH1 N F OW2",
    "information": "IH2 N F ER0 M EY1 SH AH0 N",
    "inside": "IH2 N S AY1 D",
    "into": "IH1 N T UW0",
    "is": "IH1 Z",
    "island": "AY1 L AH0 N D",
    "it": "IH1 T",
    "its": "IH1 T S",
    "job": "JH AA1 B",
    "join": "JH OY1 N",
    "just": "JH AH1 S T",
    "keep": "K IY1 P",
    "kind": "K AY1 N D",
    "know": "N OW1",
    "lake": "L EY1 K",
    "large": "L AA1 R JH",
    "last": "L AE1 S T",
    "late": "L EY1 T",
    "later": "L EY1 T ER0",
    "latest": "L EY1 T AH0 S T",
    "learn": "L ER1 N",
    "leave": "L IY1 V",
    "left": "L EH1 F T",
    "let": "L EH1 T",
    "library": "L AY1 B R EH2 R IY0",
    "life": "L AY1 F",
    "light": "L AY1 T",
    "lights": "L AY1 T S",
    "like": "L AY1 K",
    "line": "L AY1 N",
    "list": "L IH1 S T",
    "listen": "L IH1 S AH0 N",
    "little": "L IH1 T AH0 L",
    "live": "L IH1 V",
    "local": "L OW1 K AH0 L",
    "long": "L AO1 NG",
    "look": "L UH1 K",
    "lot": "L AA1 T",
    "loud": "L AW1 D",
    "love": "L AH1 V",
    "low": "L OW1",
    "lunch": "L AH1 N CH",
    "made": "M EY1 D",
    "mail": "M EY1 L",
    "make": "M EY1 K",
    "man": "M AE1 N",
    "many": "M EH1 N IY0",
    "map": "M AE1 P",
    "market": "M AA1 R K AH0 T",
    "may": "M EY1",
    "me": "M IY1",
    "mean": "M IY1 N",
    "meet": "M IY1 T",
    "meeting": "M IY1 T IH0 NG",
    "message": "M EH1 S AH0 JH",
    "middle": "M IH1 D AH0 L",
    "might": "M AY1 T",
    "mile": "M AY1 L",
    "milk": "M IH1 L K",
    "minute": "M IH1 N AH0 T",
    "minutes": "M IH1 N AH0 T S",
    "miss": "M IH1 S",
    "mom": "M AA1 M",
    "moment": "M OW1 M AH0 N T",
    "monday": "M AH1 N D EY2",
    "money": "M AH1 N IY0",
    "month": "M AH1 N TH",
    "more": "M AO1 R",
    "morning": "M AO1 R N IH0 NG",
    "most": "M OW1 S T",
    "mother": "M AH1 DH ER0",
    "move": "M UW1 V",
    "movie": "M UW1 V IY0",
    "much": "M AH1 CH",
    "music": "M Y UW1 Z IH0 K",
    "must": "M AH1 S T",
    "my": "M AY1",
    "name": "N EY1 M",
    "navigate": "N AE1 V AH0 G EY2 T",
    "near": "N IH1 R",
    "nearest": "N IH1 R AH0 S T",
    "need": "N IY1 D",
    "never": "N EH1 V ER0",
    "new": "N UW1",
    "news": "N UW1 Z",
    "next": "N EH1 K S T",
    "nice": "N AY1 S",
    "night": "N AY1 T",
    "nine": "N AY1 N",
    "no": "N OW1",
    "north": "N AO1 R TH",
    "not": "N AA1 T",
    "note": "N OW1 T",
    "nothing": "N AH1 TH IH0 NG",
    "now": "N AW1",
    "number": "N AH1 M B ER0",
    "of": "AH0 V",
    "off": "AO1 F",
    "office": "AO1 F AH0 S",
    "old": "OW1 L D",
    "on": "AA1 N",
    "one": "W AH1 N",
    "only": "OW1 N L IY0",
    "open": "OW1 P AH0 N",
    "or": "AO1 R",
    "order": "AO1 R D ER0",
    "other": "AH1 DH ER0",
    "our": "AW1 ER0",
    "out": "AW1 T",
    "outside": "AW1 T S AY1 D",
    "over": "OW1 V ER0",
    "page": "P EY1 JH",
    "park": "P AA1 R K",
    "part": "P AA1 R T",
    "party": "P AA1 R T IY0",
    "pause": "P AO1 Z",
    "pay": "P EY1",
    "people": "P IY1 P AH0 L",
    "phone": "F OW1 N",
    "photo": "F OW1 T OW2",
    "pick": "P IH1 K",
    "picture": "P IH1 K CH ER0",
    "place": "P L EY1 S",
    "plan": "P L AE1 N",
    "play": "P L EY1",
    "playlist": "P L EY1 L IH2 S T",
    "please": "P L IY1 Z",
    "podcast": "P AA1 D K AE2 S T",
    "point": "P OY1 N T",
    "police": "P AH0 L IY1 S",
    "pool": "P UW1 L",
    "post": "P OW1 S T",
    "price": "P R AY1 S",
    "project": "P R AA1 JH EH0 K T",
    "put": "P UH1 T",
    "question": "K W EH1 S CH AH0 N",
    "quick": "K W IH1 K",
    "quiet": "K W AY1 AH0 T",
    "radio": "R EY1 D IY0 OW2",
    "rain": "R EY1 N",
    "read": "R IY1 D",
    "ready": "R EH1 D IY0",
    "record": "R AH0 K AO1 R D",
    "red": "R EH1 D",
    "remind": "R IY0 M AY1 N D",
    "reminder": "R IY0 M AY1 N D ER0",
    "repeat": "R IH0 P IY1 T",
    "reservation": "R EH2 Z ER0 V EY1 SH AH0 N",
    "restaurant": "R EH1 S T ER0 AA2 N T",
    "right": "R AY1 T",
    "river": "R IH1 V ER0",
    "road": "R OW1 D",
    "rock": "R AA1 K",
    "room": "R UW1 M",
    "route": "R UW1 T",
    "run": "R AH1 N",
    "said": "S EH1 D",
    "same": "S EY1 M",
    "saturday": "S AE1 T ER0 D EY2",
    "save": "S EY1 V",
    "say": "S EY1",
    "school": "S K UW1 L",
    "search": "S ER1 CH",
    "season": "S IY1 Z AH0 N",
    "second": "S EH1 K AH0 N D",
    "see": "S IY1",
    "send": "S EH1 N D",
    "set": "S EH1 T",
    "seven": "S EH1 V AH0 N",
    "share": "SH EH1 R",
    "she": "SH IY1",
    "shop": "SH AA1 P",
    "short": "SH AO1 R T",
    "should": "SH UH1 D",
    "show": "SH OW1",
    "side": "S AY1 D",
    "since": "S IH1 N S",
    "sing": "S IH1 NG",
    "singer": "S IH1 NG ER0",
    "sister": "S IH1 S T ER0",
    "six": "S IH1 K S",
    "skip": "S K IH1 P",
    "sleep": "S L IY1 P",
    "small": "S M AO1 L",
    "so": "S OW1",
    "some": "S AH1 M",
    "something": "S AH1 M TH IH0 NG",
    "song": "S AO1 NG",
    "songs": "S AO1 NG Z",
    "soon": "S UW1 N",
    "sound": "S AW1 N D",
    "south": "S AW1 TH",
    "speak": "S P IY1 K",
    "sport": "S P AO1 R T",
    "square": "S K W EH1 R",
    "start": "S T AA1 R T",
    "station": "S T EY1 SH AH0 N",
    "stay": "S T EY1",
    "still": "S T IH1 L",
    "stop": "S T AA1 P",
    "store": "S T AO1 R",
    "story": "S T AO1 R IY0",
    "street": "S T R IY1 T",
    "sunday": "S AH1 N D EY2",
    "sunny": "S AH1 N IY0",
    "switch": "S W IH1 CH",
    "take": "T EY1 K",
    "talk": "T AO1 K",
    "team": "T IY1 M",
    "tell": "T EH1 L",
    "temperature": "T EH1 M P R AH0 CH ER0",
    "ten": "T EH1 N",
    "text": "T EH1 K S T",
    "than": "DH AE1 N",
    "thank": "TH AE1 NG K",
    "that": "DH AE1 T",
    "the": "DH AH0",
    "theater": "TH IY1 AH0 T ER0",
    "their": "DH EH1 R",
    "them": "DH EH1 M",
    "then": "DH EH1 N",
    "there": "DH EH1 R",
    "these": "DH IY1 Z",
    "they": "DH EY1",
    "thing": "TH IH1 NG",
    "think": "TH IH1 NG K",
    "this": "DH IH1 S",
    "three": "TH R IY1",
    "through": "TH R UW1",
    "ticket": "T IH1 K AH0 T",
    "tickets": "T IH1 K AH0 T S",
    "time": "T AY1 M",
    "timer": "T AY1 M ER0",
    "to": "T UW1",
    "today": "T AH0 D EY1",
    "tomorrow": "T AH0 M AA1 R OW2",
    "tonight": "T AH0 N AY1 T",
    "top": "T AA1 P",
    "town": "T AW1 N",
    "track": "T R AE1 K",
    "traffic": "T R AE1 F IH0 K",
    "train": "T R EY1 N",
    "travel": "T R AE1 V AH0 L",
    "trip": "T R IH1 P",
    "try": "T R AY1",
    "tuesday": "T UW1 Z D EY2",
    "turn": "T ER1 N",
    "tv": "T IY1 V IY1",
    "two": "T UW1",
    "under": "AH1 N D ER0",
    "until": "AH0 N T IH1 L",
    "up": "AH1 P",
    "update": "AH0 P D EY1 T",
    "us": "AH1 S",
    "use": "Y UW1 Z",
    "very": "V EH1 R IY0",
    "video": "V IH1 D IY0 OW0",
    "village": "V IH1 L AH0 JH",
    "visit": "V IH1 Z AH0 T",
    "voice": "V OY1 S",
    "volume": "V AA1 L Y UW0 M",
    "wait": "W EY1 T",
    "wake": "W EY1 K",
    "walk": "W AO1 K",
    "want": "W AA1 N T",
    "warm": "W AO1 R M",
    "was": "W AA1 Z",
    "watch": "W AA1 CH",
    "water": "W AO1 T ER0",
    "way": "W EY1",
    "we": "W IY1",
    "weather": "W EH1 DH ER0",
    "week": "W IY1 K",
    "weekend": "W IY1 K EH2 N D",
    "well": "W EH1 L",
    "west": "W EH1 S T",
    "what": "W AH1 T",
    "when": "W EH1 N",
    "where": "W EH1 R",
    "which": "W IH1 CH",
    "while": "W AY1 L",
    "white": "W AY1 T",
    "who": "HH UW1",
    "why": "W AY1",
    "will": "W IH1 L",
    "wind": "W IH1 N D",
    "window": "W IH1 N D OW0",
    "with": "W IH1 DH",
    "word": "W ER1 D",
    "work": "W ER1 K",
    "world": "W ER1 L D",
    "would": "W UH1 D",
    "write": "R AY1 T",
    "year": "Y IH1 R",
    "yes": "Y EH1 S",
    "yesterday": "Y EH1 S T ER0 D EY2",
    "you": "Y UW1",
    "your": "Y AO1 R",
    "zero": "Z IH1 R OW0",
    "zoo": "Z UW1",
}


def arpa_to_ipa(arpa: str):
    out = []
    for tok in arpa.split():
        base = tok.rstrip("012")
        if tok.endswith("0") and base == "AH":
            out.extend(ARPA_TO_IPA["AH0"])
        else:
            out.extend(ARPA_TO_IPA[base])
    return out


def main():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    out_path = os.path.join(root, "data", "lexicon.tsv")
    lines = []
    for word in sorted(LEXICON):
        ipa = arpa_to_ipa(LEXICON[word])
        assert ipa, word
        lines.append(f"{word}\t{' '.join(ipa)}\n")
    with io.open(out_path, "w", encoding="utf-8") as f:
        f.writelines(lines)
    print(f"wrote {len(lines)} entries to {out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Generate the caption-style POS-tagged fixture corpora.

Sentences come from a small caption grammar with Penn Treebank tags assigned
by construction. Output format: one sentence per line, `word_TAG` tokens.

    python3 scripts/gen_tagged_corpus.py crates/core/data/corpus
"""
import random
import sys
from pathlib import Path

IRREGULAR = {
    "man": "men", "woman": "women", "child": "children", "person": "people",
    "mouse": "mice", "goose": "geese", "knife": "knives", "calf": "calves",
    "shelf": "shelves", "wolf": "wolves", "bus": "buses", "sheep": "sheep",
    "deer": "deer", "fish": "fish", "potato": "potatoes", "tomato": "tomatoes",
    "cookie": "cookies", "policeman": "policemen", "taxi": "taxis", "leaf": "leaves",
}


def plural(noun):
    words = noun.split()
    head = words[-1]
    if head in IRREGULAR:
        p = IRREGULAR[head]
    elif head.endswith("y") and head[-2] not in "aeiou":
        p = head[:-1] + "ies"
    elif head.endswith(("s", "x", "z", "ch", "sh")):
        p = head + "es"
    else:
        p = head + "s"
    return " ".join(words[:-1] + [p])


def np_tokens(noun, number, modifier_tags=None):
    """Tag a (possibly compound) noun phrase head."""
    words = noun.split()
    out = []
    for i, w in enumerate(words[:-1]):
        tag = (modifier_tags or {}).get(w, "NN")
        out.append((w, tag))
    out.append((words[-1], "NNS" if number > 1 else "NN"))
    return out


MODIFIER_TAGS = {"hot": "JJ", "potted": "JJ", "sports": "NNS"}

PEOPLE = ["man", "woman", "boy", "girl", "child", "kid", "baby", "guy", "lady",
          "person", "player", "skier", "surfer", "skateboarder", "snowboarder",
          "batter", "catcher", "chef", "cook", "rider", "policeman", "farmer",
          "tennis player", "friend"]
ANIMALS = ["dog", "cat", "horse", "sheep", "cow", "elephant", "bear", "zebra",
           "giraffe", "bird", "puppy", "kitten", "pony", "lamb", "calf", "bull",
           "goat", "deer", "duck", "seagull", "pigeon", "owl", "squirrel", "lion"]
VEHICLES = ["bicycle", "bike", "car", "motorcycle", "airplane", "plane", "jet",
            "bus", "train", "truck", "boat", "taxi", "van", "scooter", "helicopter",
            "ship", "sailboat", "canoe", "ferry", "tractor", "pickup truck"]
RIDEABLE = ["bicycle", "bike", "motorcycle", "horse", "elephant", "skateboard",
            "surfboard", "snowboard", "wave", "scooter", "pony", "bus", "train"]
HANDHELD = ["umbrella", "frisbee", "kite", "tennis racket", "racket",
            "baseball bat", "bat", "baseball glove", "skateboard", "surfboard",
            "snowboard", "ball", "soccer ball", "backpack", "handbag", "purse",
            "suitcase", "bag", "knife", "fork", "spoon", "cup", "mug", "bottle",
            "wine glass", "glass", "bowl", "plate", "cell phone", "phone",
            "remote", "controller", "laptop", "book", "toothbrush", "teddy bear",
            "hair drier", "camera", "newspaper", "sports ball", "toy"]
FOOD = ["pizza", "cake", "sandwich", "hot dog", "banana", "apple", "orange",
        "broccoli", "carrot", "donut", "doughnut", "burger", "hamburger", "salad",
        "soup", "bread", "cookie", "cupcake", "pie", "dessert", "meat", "chicken",
        "sausage", "cheese", "rice", "egg", "fruit", "vegetable", "tomato",
        "potato", "onion", "food", "meal", "breakfast", "lunch", "dinner"]
DRINKS = ["coffee", "wine", "beer", "tea", "juice", "milk", "water"]
FURNITURE = ["chair", "couch", "sofa", "bed", "table", "dining table", "desk",
             "toilet", "sink", "counter", "shelf", "cabinet", "bench",
             "stool", "bathtub", "tub"]
INDOOR_OBJ = ["tv", "television", "monitor", "keyboard", "mouse", "oven",
              "microwave", "toaster", "refrigerator", "fridge", "stove", "clock",
              "vase", "potted plant", "plant", "flower", "lamp", "mirror",
              "pillow", "blanket", "window", "door", "wall", "shower"]
PLACES = ["street", "road", "sidewalk", "highway", "intersection", "field",
          "beach", "ocean", "water", "lake", "river", "park", "city", "snow",
          "slope", "hill", "mountain", "grass", "kitchen", "bathroom",
          "bedroom", "living room", "room", "airport", "runway", "station",
          "platform", "track", "bridge", "corner", "yard", "court", "zoo",
          "parking lot", "restaurant", "area", "pen", "dirt", "forest"]
OUTDOOR_OBJ = ["traffic light", "fire hydrant", "stop sign", "parking meter",
               "bench", "sign", "pole", "street sign", "light", "tree",
               "building", "house", "fence", "tower", "clock tower", "umbrella"]
CLOTHES = ["hat", "cap", "tie", "shirt", "jacket", "helmet", "coat", "dress",
           "uniform", "suit", "wetsuit", "glove"]
# nouns that only ever appear in the held-out split
HELDOUT_ONLY = {"squirrel", "lion", "ferry", "tractor", "hair drier", "camera",
                "toy", "onion", "meal", "stool", "shower", "forest", "dirt",
                "wetsuit", "owl", "canoe", "dessert", "pole"}

ADJ = ["large", "small", "big", "little", "young", "old", "white", "black",
       "red", "blue", "green", "yellow", "brown", "orange", "pink", "wooden",
       "empty", "tall", "busy", "clean", "dirty", "cute", "pretty", "colorful",
       "open", "giant", "huge", "tiny", "fresh", "delicious", "crowded",
       "grassy", "snowy", "sunny", "dark", "bright", "nice", "happy"]
COUNT = ["two", "three", "four", "five", "several", "many", "some"]
COUNT_TAG = {"several": "JJ", "many": "JJ", "some": "DT"}

VERB_OBJ = {
    "riding": RIDEABLE, "holding": HANDHELD + FOOD[:12] + ["puppy", "kitten", "baby"],
    "eating": FOOD, "cutting": ["cake", "pizza", "sandwich", "bread", "cheese",
                                "meat", "carrot", "onion", "tomato", "pie"],
    "carrying": HANDHELD, "throwing": ["frisbee", "ball", "baseball", "soccer ball"],
    "catching": ["frisbee", "ball", "baseball"], "flying": ["kite", "airplane"],
    "using": ["laptop", "phone", "cell phone", "knife", "computer", "remote",
              "toothbrush", "camera", "keyboard", "mouse", "umbrella"],
    "watching": ["tv", "television", "game", "train", "dog", "sunset"],
    "wearing": CLOTHES, "swinging": ["bat", "baseball bat", "racket", "tennis racket"],
    "hitting": ["ball", "tennis ball", "baseball"], "driving": ["car", "truck", "bus", "tractor", "van"],
    "feeding": ANIMALS, "petting": ["dog", "cat", "horse", "puppy", "kitten", "giraffe", "elephant"],
    "preparing": FOOD, "making": ["pizza", "sandwich", "cake", "food", "salad", "dinner"],
    "drinking": DRINKS, "pulling": ["suitcase", "cart", "bag", "kite"],
    "chasing": ["ball", "frisbee", "bird", "dog", "cat"],
    "looking at": HANDHELD + ANIMALS + VEHICLES, "playing with": HANDHELD[:12] + ANIMALS[:8],
    "taking": ["picture", "photo", "bite", "nap", "break"],
    "pushing": ["stroller", "cart", "bicycle", "bike"], "sharing": FOOD,
}
INTRANS = ["sitting", "standing", "walking", "laying", "lying", "waiting",
           "parked", "resting", "playing", "grazing", "posing", "skiing",
           "surfing", "skateboarding", "snowboarding", "running", "smiling",
           "sleeping", "crossing", "flying", "perched", "displayed", "stacked",
           "placed", "covered", "filled", "topped", "loaded", "traveling"]
VBN = {"parked", "perched", "displayed", "stacked", "placed", "covered",
       "filled", "topped", "loaded"}
PREPS = ["on", "in", "near", "at", "under", "behind", "by", "beside", "across",
         "along", "over", "through", "inside", "down", "around", "past", "into"]
VBZ = {"riding": "rides", "holding": "holds", "eating": "eats", "cutting": "cuts",
       "carrying": "carries", "throwing": "throws", "catching": "catches",
       "flying": "flies", "using": "uses", "watching": "watches", "wearing": "wears",
       "swinging": "swings", "hitting": "hits", "driving": "drives",
       "feeding": "feeds", "petting": "pets", "preparing": "prepares",
       "making": "makes", "drinking": "drinks", "pulling": "pulls",
       "chasing": "chases", "looking at": "looks at", "playing with": "plays with",
       "taking": "takes", "pushing": "pushes", "sharing": "shares"}
VBP = {"riding": "ride", "holding": "hold", "eating": "eat", "cutting": "cut",
       "carrying": "carry", "throwing": "throw", "catching": "catch",
       "flying": "fly", "using": "use", "watching": "watch", "wearing": "wear",
       "swinging": "swing", "hitting": "hit", "driving": "drive",
       "feeding": "feed", "petting": "pet", "preparing": "prepare",
       "making": "make", "drinking": "drink", "pulling": "pull",
       "chasing": "chase", "looking at": "look", "playing with": "play",
       "taking": "take", "pushing": "push", "sharing": "share"}
MASS = {"rice", "water", "snow", "grass", "food", "bread", "cheese", "soup",
        "tea", "juice", "milk", "coffee", "wine", "beer", "broccoli", "meat",
        "dirt", "breakfast", "lunch", "dinner", "chicken", "fruit", "salad"}


class Gen:
    def __init__(self, rng, allow):
        self.rng = rng
        self.allow = allow

    def pick(self, seq):
        seq = [x for x in seq if self.allow(x)]
        return self.rng.choice(seq)

    def np(self, pool, number=None, det=True, adj_p=0.3):
        r = self.rng
        noun = self.pick(pool)
        if number is None:
            number = 1 if r.random() < 0.78 else 2
        toks = []
        if noun in MASS:
            number = 1
        if number > 1:
            c = r.choice(COUNT + ["the", "", ""])
            if c:
                toks.append((c, COUNT_TAG.get(c, "DT" if c == "the" else "CD")))
        elif det:
            d = r.choices(["a", "the", "this", "another", "his", "her", "their"],
                          [10, 6, 1, 0.5, 0.7, 0.7, 0.5])[0]
            toks.append((d, "PRP$" if d in ("his", "her", "their") else "DT"))
        if r.random() < adj_p:
            toks.append((r.choice(ADJ), "JJ"))
            if r.random() < 0.1:
                toks.append((r.choice(ADJ), "JJ"))
        word = plural(noun) if number > 1 else noun
        toks.extend(np_tokens(word, number, MODIFIER_TAGS))
        # fix indefinite article before vowels
        if toks and toks[0][0] == "a" and len(toks) > 1 and toks[1][0][0] in "aeiou":
            toks[0] = ("an", "DT")
        return toks, number

    def pp(self, pool=None):
        r = self.rng
        prep = r.choice(PREPS)
        if prep == "next":
            pass
        if r.random() < 0.15:
            head = [("next", "JJ"), ("to", "TO")]
        elif r.random() < 0.08:
            head = [("on", "IN"), ("top", "NN"), ("of", "IN")]
        elif r.random() < 0.06:
            head = [("in", "IN"), ("front", "NN"), ("of", "IN")]
        else:
            head = [(prep, "IN")]
        obj, _ = self.np(pool or (PLACES + FURNITURE + OUTDOOR_OBJ))
        return head + obj

    def subject(self):
        pool = self.rng.choice([PEOPLE, PEOPLE, ANIMALS, VEHICLES, FOOD, HANDHELD, INDOOR_OBJ])
        return self.np(pool)

    def s_progressive(self):
        r = self.rng
        subj, n = self.np(r.choice([PEOPLE, PEOPLE, PEOPLE, ANIMALS]))
        verb = r.choice(list(VERB_OBJ))
        toks = list(subj)
        if r.random() < 0.35:
            toks.append(("is", "VBZ") if n == 1 else ("are", "VBP"))
        toks += [(w, "VBG" if i == 0 else "IN") for i, w in enumerate(verb.split())]
        obj, _ = self.np(VERB_OBJ[verb], number=1 if r.random() < 0.8 else 2)
        toks += obj
        if r.random() < 0.5:
            toks += self.pp()
        if r.random() < 0.12:
            verb2 = r.choice(list(VERB_OBJ))
            toks += [("and", "CC")] + [(w, "VBG" if i == 0 else "IN") for i, w in enumerate(verb2.split())]
            toks += self.np(VERB_OBJ[verb2])[0]
        return toks

    def s_present(self):
        r = self.rng
        subj, n = self.np(r.choice([PEOPLE, ANIMALS]))
        verb = r.choice(list(VBZ))
        form = VBZ[verb] if n == 1 else VBP[verb] + (" " + verb.split()[1] if " " in verb else "")
        parts = form.split()
        toks = list(subj) + [(parts[0], "VBZ" if n == 1 else "VBP")] + [(w, "IN") for w in parts[1:]]
        toks += self.np(VERB_OBJ[verb])[0]
        if r.random() < 0.5:
            toks += self.pp()
        return toks

    def s_intrans(self):
        r = self.rng
        subj, n = self.subject()
        v = self.pick(INTRANS)
        toks = list(subj)
        if r.random() < 0.3:
            toks.append(("is", "VBZ") if n == 1 else ("are", "VBP"))
        toks.append((v, "VBN" if v in VBN else "VBG"))
        if v in ("covered", "filled", "topped", "loaded"):
            toks.append(("with", "IN"))
            toks += self.np(FOOD + HANDHELD, number=r.choice([1, 2]), det=r.random() < 0.5)[0]
        elif v in ("playing",) and r.random() < 0.5:
            toks.append((r.choice(["tennis", "baseball", "soccer", "frisbee", "football", "video games"]), "NN"))
            if toks[-1][0] == "video games":
                toks[-1:] = [("video", "NN"), ("games", "NNS")]
        else:
            if r.random() < 0.2:
                toks.append((r.choice(["together", "outside", "nearby", "alone"]), "RB"))
            else:
                toks += self.pp()
        if r.random() < 0.2:
            toks += self.pp()
        return toks

    def s_there(self):
        r = self.rng
        obj, n = self.np(r.choice([PEOPLE, ANIMALS, VEHICLES, FOOD, HANDHELD, INDOOR_OBJ]))
        toks = [("there", "EX"), ("is", "VBZ") if n == 1 else ("are", "VBP")] + obj
        toks += self.pp()
        return toks

    def s_coord(self):
        r = self.rng
        a, _ = self.np(r.choice([HANDHELD, FOOD, INDOOR_OBJ, ANIMALS, VEHICLES]))
        b, _ = self.np(r.choice([HANDHELD, FOOD, INDOOR_OBJ, ANIMALS, VEHICLES]))
        toks = a + [("and", "CC")] + b
        if r.random() < 0.3:
            toks.append(("are", "VBP"))
            toks.append((r.choice(["sitting", "laying", "parked", "placed", "displayed"]), "VBG"))
            if toks[-1][0] in VBN:
                toks[-1] = (toks[-1][0], "VBN")
        toks += self.pp()
        return toks

    def s_with(self):
        r = self.rng
        a, _ = self.np(r.choice([PLACES, FURNITURE, FOOD]), number=1)
        toks = a + [("with", "IN")]
        toks += self.np(r.choice([HANDHELD, FOOD, INDOOR_OBJ, FURNITURE]))[0]
        if r.random() < 0.4:
            toks += [("and", "CC")] + self.np(r.choice([HANDHELD, FOOD, INDOOR_OBJ]))[0]
        return toks

    def s_of(self):
        r = self.rng
        lead = r.choice([("group", PEOPLE + ANIMALS), ("plate", FOOD), ("slice", ["pizza", "cake", "bread", "cheese", "pie", "orange", "apple"]),
                         ("piece", ["cake", "pizza", "bread", "pie", "chicken"]), ("bunch", ["bananas", "carrots", "flowers", "people", "kites"]),
                         ("herd", ["sheep", "cows", "elephants", "zebras", "cattle", "giraffes", "horses"]),
                         ("couple", PEOPLE + ANIMALS), ("box", ["donuts", "pizza", "cookies", "doughnuts"]),
                         ("bowl", FOOD), ("cup", DRINKS), ("glass", DRINKS), ("view", PLACES + OUTDOOR_OBJ), ("picture", ANIMALS + VEHICLES)])
        toks = [("a", "DT")]
        if r.random() < 0.2:
            toks.append((r.choice(ADJ), "JJ"))
            if toks[-1][0][0] in "aeiou":
                toks[0] = ("an", "DT")
        toks += [(lead[0], "NN"), ("of", "IN")]
        choice = r.choice(lead[1])
        if not self.allow(choice):
            choice = "food"
        if choice.endswith("s") and choice not in ("bus", "glass") and " " not in choice and lead[0] in ("bunch", "herd", "box"):
            toks.append((choice, "NNS"))
        elif lead[0] in ("group", "couple"):
            toks += np_tokens(plural(choice), 2, MODIFIER_TAGS)
        elif lead[0] in ("view", "picture"):
            toks += self.np([choice])[0]
        else:
            toks += np_tokens(choice, 1, MODIFIER_TAGS)
        if r.random() < 0.6:
            v = r.choice(["sitting", "standing", "walking", "grazing", "waiting", "posing", "laying"])
            if lead[0] not in ("group", "couple", "herd"):
                v = r.choice(["sitting", "laying", "placed", "displayed"])
            toks.append((v, "VBN" if v in VBN else "VBG"))
            toks += self.pp()
        return toks

    def sentence(self):
        r = self.rng
        kind = r.choices([self.s_progressive, self.s_present, self.s_intrans, self.s_there,
                          self.s_coord, self.s_with, self.s_of], [30, 8, 25, 6, 8, 10, 13])[0]
        toks = kind()
        if r.random() < 0.5:
            w, t = toks[0]
            toks[0] = (w[0].upper() + w[1:], t)
        if r.random() < 0.4:
            toks.append((".", "."))
        return toks


def fmt(toks):
    return " ".join(f"{w}_{t}" for w, t in toks)


PATTERNS = [
    [("a", "DT"), ("man", "NN"), ("riding", "VBG"), ("a", "DT"), ("motorcycle", "NN")],
    [("a", "DT"), ("woman", "NN"), ("cutting", "VBG"), ("a", "DT"), ("cake", "NN")],
    [("a", "DT"), ("woman", "NN"), ("cutting", "VBG"), ("a", "DT"), ("pizza", "NN")],
    [("a", "DT"), ("man", "NN"), ("riding", "VBG"), ("a", "DT"), ("bicycle", "NN")],
    [("two", "CD"), ("traffic", "NN"), ("lights", "NNS"), ("near", "IN"), ("the", "DT"), ("dogs", "NNS")],
]


def main():
    out = Path(sys.argv[1])
    out.mkdir(parents=True, exist_ok=True)
    train = Gen(random.Random(20190601), lambda n: n not in HELDOUT_ONLY)
    heldout = Gen(random.Random(20190602), lambda n: True)
    with open(out / "train.tagged", "w") as f:
        for _ in range(500):
            f.write(fmt(train.sentence()) + "\n")
    with open(out / "heldout.tagged", "w") as f:
        for _ in range(200):
            f.write(fmt(heldout.sentence()) + "\n")
    with open(out / "caption_patterns.tagged", "w") as f:
        for p in PATTERNS:
            f.write(fmt(p) + "\n")


if __name__ == "__main__":
    main()

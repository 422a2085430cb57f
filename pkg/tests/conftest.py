import datetime

import pytest

from hybridrank.corpus import Corpus, Document


@pytest.fixture
def tiny_corpus() -> Corpus:
    docs = [
        Document("d1", title="coronavirus immunity studies",
                 abstract="Immunity against coronavirus develops after infection. Cross protection is possible.",
                 fulltext="Patients infected with coronavirus showed antibodies. The immunity lasted months.",
                 pub_date=datetime.date(2020, 3, 1)),
        Document("d2", title="influenza vaccine trial",
                 abstract="A vaccine trial for influenza was conducted. Results were mixed.",
                 fulltext="",
                 pub_date=datetime.date(2020, 1, 15)),
        Document("d3", title="old coronavirus report",
                 abstract="An early report on coronavirus types.",
                 fulltext="Historic coronavirus outbreaks were reviewed.",
                 pub_date=datetime.date(2019, 6, 1)),
        Document("d4", title="diabetes complications",
                 abstract="Complications in diabetic patients are common. Treatment varies.",
                 fulltext="Diabetes management requires care.",
                 pub_date=None),
    ]
    return Corpus.from_documents(docs)


def make_doc(i: int, title="", abstract="", fulltext="", date=None) -> Document:
    return Document(f"doc{i:03d}", title, abstract, fulltext, date)

"""
Token labels from field values
==============================

Bookkeeping systems store field values ("gross amount = 40.00 €"), not
token positions.  This script matches those values to OCR tokens.
"""

# %%
from dipeval import BoundingBox, Document, FieldValue, MatchPolicy, Token, annotate_document, match_field

texts = ["Acme", "AG", "Rechnung", "Nr.", "R-l234", "Summe", "40.00", "€"]
doc = Document("r1", "acme", tuple(Token(t, BoundingBox(40 * i, 10, 40 * i + 35, 30)) for i, t in enumerate(texts)))
policy = MatchPolicy()

# %%
# Fuzzy classes tolerate a few OCR mistakes ("l" read for "1"); the bound
# grows with the value length.
res = match_field(FieldValue("invoicenumber", "R-1234"), doc, policy)
print("invoicenumber ->", res.span, "distance", res.distance)
print("bound for a 6-character value:", policy.max_lev_distance(6))

# %%
# Amounts and dates must match exactly (whitespace aside), so a comma
# instead of a point means no match at all.
print(match_field(FieldValue("grossamount", "40.00 €"), doc, policy))
print(match_field(FieldValue("grossamount", "40,00 €"), doc, policy))

# %%
# Annotating a document labels every matched span and sets everything else
# to None.  One unmatched field drops the whole document.
fields = [FieldValue("creditorname", "Acme AG"), FieldValue("invoicenumber", "R-1234"),
          FieldValue("grossamount", "40.00 €")]
annotated = annotate_document(doc, fields, policy)
print(list(zip(annotated.document.texts, annotated.document.gt_labels)))
print(annotate_document(doc, fields + [FieldValue("documentdate", "01.02.2023")], policy))

# macsim - engine subpackage

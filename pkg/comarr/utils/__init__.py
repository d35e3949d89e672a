# comarr Utils Package
